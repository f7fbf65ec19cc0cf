"""Shared curve builders, density builders, and fixtures.

The analytic test curves live here so every module exercises the same
geometry: a circle, the Gerono figure-eight, a 3-fold trefoil-shaped
curve with three crossings, and seeded random trigonometric loops.
The conveyor density pair used by the flow convergence checks lives
here too, since both the module suite and the acceptance gate use it.
"""

from __future__ import annotations

import numpy as np
import pytest

from symplane.curves import ClosedCurve, check_generic, resample
from symplane.forms import Density


def circle_curve(n=64, radius=1.0, center=(0.0, 0.0), phase=0.0, clockwise=False):
    t = phase + 2.0 * np.pi * np.arange(n) / n
    if clockwise:
        t = -t
    x = center[0] + radius * np.cos(t)
    y = center[1] + radius * np.sin(t)
    return ClosedCurve((np.column_stack([x, y]),))


def gerono_curve(n=256, scale=1.0):
    """Figure-eight (sin 2t, sin t); one crossing at the origin."""
    t = 2.0 * np.pi * np.arange(n) / n
    return ClosedCurve((scale * np.column_stack([np.sin(2 * t), np.sin(t)]),))


def trefoil_curve(n=512):
    """Three-fold curve (sin t + 2 sin 2t, cos t - 2 cos 2t), three crossings."""
    t = 2.0 * np.pi * np.arange(n) / n
    x = np.sin(t) + 2.0 * np.sin(2 * t)
    y = np.cos(t) - 2.0 * np.cos(2 * t)
    return ClosedCurve((np.column_stack([x, y]),))


def random_trig_loop(rng, n=256, order=3, amplitude=0.45):
    """A closed trigonometric loop: unit circle plus random low harmonics."""
    t = 2.0 * np.pi * np.arange(n) / n
    x = np.cos(t)
    y = np.sin(t)
    for k in range(2, order + 2):
        ax, bx, ay, by = amplitude * rng.uniform(-1.0, 1.0, size=4) / k
        x = x + ax * np.cos(k * t) + bx * np.sin(k * t)
        y = y + ay * np.cos(k * t) + by * np.sin(k * t)
    return ClosedCurve((np.column_stack([x, y]),))


def generic_trig_loops(seed, count, n=256, order=3):
    """First `count` random trig loops that pass check_generic, with reports."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        curve = resample(random_trig_loop(rng, n=n, order=order), n)
        report = check_generic(curve)
        if report.is_generic:
            out.append((curve, report))
    return out


def smootherstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u**3 * (u * (6.0 * u - 15.0) + 10.0)


def conveyor_pair(eps, nx=2304, ny=8, speed=10.5):
    """Density pair whose flow rides a traveling wiggle field.

    f1 carries f0's wiggle pattern shifted by exactly the transit
    displacement `speed`, so the time-1 map is a rigid translation
    between the end ramps and the wiggles add no spatial floor to the
    pullback defect. The shift is a half-integer number of wavelengths:
    the interpolated wiggle amplitude sweeps through zero at t = 1/2,
    so the velocity field is genuinely time dependent and the RK4 time
    error stays visible instead of averaging out per period. Wide
    shallow end ramps supply the flux with negligible map curvature.
    Row integrals of f0 - f1 vanish identically: the ramp masses match
    by construction and the wiggle term is a pure translate.
    """
    width = 34.5
    xs = np.linspace(0.0, width, nx)

    def wig(x):
        env = smootherstep((x - 8.0) / 2.0) * smootherstep((16.0 - x) / 2.0)
        return env * np.sin(2.0 * np.pi * (x - 8.0))

    def ramp(c, rb=3.5):
        u = (xs - c) / rb
        prof = np.where(np.abs(u) < 1.0, (1.0 - np.minimum(u * u, 1.0)) ** 4, 0.0)
        return prof * (315.0 / 256.0) / rb

    v0 = 1.0 + eps * wig(xs) + speed * ramp(4.0)
    v1 = 1.0 + eps * wig(xs - speed) + speed * ramp(30.5)

    def dens(vals):
        grid = np.repeat(vals[:, None], ny, axis=1)
        return Density(0.0, width, 0.0, 1.0, nx, ny, grid,
                       support_box=(0.0, width, 0.0, 1.0))

    return dens(v0), dens(v1)


@pytest.fixture(scope="session")
def circle512():
    return circle_curve(n=512)


@pytest.fixture(scope="session")
def gerono256():
    return gerono_curve(n=256)


@pytest.fixture(scope="session")
def trefoil512():
    return trefoil_curve(n=512)
