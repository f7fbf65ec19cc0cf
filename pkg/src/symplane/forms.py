"""Area-form engine on sampled grids.

A Density holds the coefficient f of an area form f dx dy on a uniform
rectangular grid, equal to 1 outside a stated support box. PlanarMap
implementations carry pointwise Jacobians, either analytic (affine,
shear, composition) or by central differences on a displacement grid.
On top of these sit the pullback, the explicit primitive map
(x, y) -> (integral of f along the row, y), bump-function realization
of prescribed face areas, and Moser interpolation between densities.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import RectBivariateSpline

from .arrangement import Arrangement, integrate_density_over_faces
from .errors import (
    FormatError,
    InconsistencyError,
    RealizationError,
    ValidationError,
)

DEFAULT_GRID = 256
DEFAULT_INFLATE = 0.25
UNIT_SNAP = 1e-12


def _bilinear(values, x0, y0, hx, hy, x, y):
    """Bilinear interpolation of node values at (x, y), clamped to the grid."""
    nx, ny = values.shape
    fx = np.clip((x - x0) / hx, 0.0, nx - 1.0)
    fy = np.clip((y - y0) / hy, 0.0, ny - 1.0)
    ix = np.minimum(fx.astype(int), nx - 2)
    iy = np.minimum(fy.astype(int), ny - 2)
    tx = fx - ix
    ty = fy - iy
    v00 = values[ix, iy]
    v10 = values[ix + 1, iy]
    v01 = values[ix, iy + 1]
    v11 = values[ix + 1, iy + 1]
    return (
        v00 * (1 - tx) * (1 - ty)
        + v10 * tx * (1 - ty)
        + v01 * (1 - tx) * ty
        + v11 * tx * ty
    )


def infer_support_box(x0, x1, y0, y1, nx, ny, values):
    """Tight box around the nodes where values differ from 1, one cell margin."""
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    off = np.argwhere(values != 1.0)
    if len(off) == 0:
        cx = 0.5 * (x0 + x1)
        cy = 0.5 * (y0 + y1)
        return (cx, cx, cy, cy)
    ix0, iy0 = off.min(axis=0)
    ix1, iy1 = off.max(axis=0)
    return (
        float(xs[max(0, ix0 - 1)]),
        float(xs[min(nx - 1, ix1 + 1)]),
        float(ys[max(0, iy0 - 1)]),
        float(ys[min(ny - 1, iy1 + 1)]),
    )


@dataclass(frozen=True)
class Density:
    """Positive grid density, exactly 1 outside its support box.

    values has shape (nx, ny) with the first index along x, so
    values[i, j] is the coefficient at (xs[i], ys[j]).
    """

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    values: np.ndarray
    support_box: tuple

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValidationError("degenerate density domain")
        if self.nx < 2 or self.ny < 2:
            raise ValidationError("density grid needs at least 2 nodes per axis")
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.nx, self.ny):
            raise ValidationError(
                f"values shape {vals.shape} does not match grid "
                f"({self.nx}, {self.ny})"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("density values must be finite")
        if np.any(vals <= 0):
            raise ValidationError("density values must be positive")
        sx0, sx1, sy0, sy1 = self.support_box
        if sx0 < self.x0 or sx1 > self.x1 or sy0 < self.y0 or sy1 > self.y1:
            raise ValidationError("support box exceeds the grid domain")
        xs = self.xs
        ys = self.ys
        outside = (
            (xs[:, None] < sx0)
            | (xs[:, None] > sx1)
            | (ys[None, :] < sy0)
            | (ys[None, :] > sy1)
        )
        if not np.all(vals[outside] == 1.0):
            raise ValidationError("density must equal 1 outside its support box")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def xs(self):
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def ys(self):
        return np.linspace(self.y0, self.y1, self.ny)

    @property
    def hx(self):
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self):
        return (self.y1 - self.y0) / (self.ny - 1)

    def same_grid(self, other):
        return (
            (self.x0, self.x1, self.y0, self.y1, self.nx, self.ny)
            == (other.x0, other.x1, other.y0, other.y1, other.nx, other.ny)
        )

    def value_at(self, points):
        """Bilinear value at each point, exactly 1 outside the grid."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x = pts[:, 0]
        y = pts[:, 1]
        out = np.ones(len(pts))
        inside = (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)
        if np.any(inside):
            out[inside] = _bilinear(
                self.values, self.x0, self.y0, self.hx, self.hy, x[inside], y[inside]
            )
        return out


def make_density(x0, x1, y0, y1, values):
    """Density over [x0,x1] x [y0,y1] with the support box inferred."""
    values = np.asarray(values, dtype=float)
    nx, ny = values.shape
    box = infer_support_box(x0, x1, y0, y1, nx, ny, values)
    return Density(x0, x1, y0, y1, nx, ny, values, box)


def unit_density(x0, x1, y0, y1, nx=DEFAULT_GRID, ny=None):
    """The constant density 1 on the given domain."""
    if ny is None:
        ny = nx
    return make_density(x0, x1, y0, y1, np.ones((nx, ny)))


def density_for_curve(curve, n=DEFAULT_GRID, inflate=DEFAULT_INFLATE):
    """Unit density on the curve's bounding box inflated on every side."""
    cx0, cx1, cy0, cy1 = curve.bbox()
    pad = inflate * max(cx1 - cx0, cy1 - cy0, 1e-9)
    return unit_density(cx0 - pad, cx1 + pad, cy0 - pad, cy1 + pad, n, n)


def serialize_density(d: Density) -> str:
    lines = ["density v1"]
    lines.append(
        f"{float(d.x0)!r} {float(d.x1)!r} {float(d.y0)!r} {float(d.y1)!r} "
        f"{d.nx} {d.ny}"
    )
    for j in range(d.ny):
        lines.append(" ".join(repr(float(v)) for v in d.values[:, j]))
    return "\n".join(lines) + "\n"


def save_density(d: Density, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_density(d))


def _parse_grid_header(lines, tag):
    if not lines or lines[0].strip() != f"{tag} v1":
        raise FormatError(f"expected header '{tag} v1'")
    if len(lines) < 2:
        raise FormatError("missing domain line")
    parts = lines[1].split()
    if len(parts) != 6:
        raise FormatError("domain line must be 'x0 x1 y0 y1 nx ny'")
    try:
        x0, x1, y0, y1 = (float(p) for p in parts[:4])
        nx, ny = (int(p) for p in parts[4:])
    except ValueError as exc:
        raise FormatError(f"bad domain line: {exc}") from None
    return x0, x1, y0, y1, nx, ny


def parse_density(text: str) -> Density:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    x0, x1, y0, y1, nx, ny = _parse_grid_header(lines, "density")
    tokens = " ".join(lines[2:]).split()
    if len(tokens) != nx * ny:
        raise FormatError(f"expected {nx * ny} density values, found {len(tokens)}")
    try:
        flat = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise FormatError(f"bad density value: {exc}") from None
    # file order is row by row in y, x varying fastest
    values = flat.reshape(ny, nx).T
    return make_density(x0, x1, y0, y1, values)


def load_density(path) -> Density:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_density(fh.read())


class PlanarMap:
    """Orientation-preserving plane map with a pointwise Jacobian."""

    def evaluate(self, points):
        """Map an (m, 2) array of points to an (m, 2) array."""
        raise NotImplementedError

    def jacobian(self, points):
        """(m, 2, 2) Jacobian matrices at the given points."""
        raise NotImplementedError


def _as_points(points):
    return np.atleast_2d(np.asarray(points, dtype=float))


class AffineMap(PlanarMap):
    """p -> M p + b with constant Jacobian M."""

    def __init__(self, matrix, offset=(0.0, 0.0)):
        m = np.asarray(matrix, dtype=float)
        if m.shape != (2, 2):
            raise ValidationError("affine matrix must be 2x2")
        if np.linalg.det(m) <= 0:
            raise ValidationError("affine map must preserve orientation")
        self.matrix = m
        self.offset = np.asarray(offset, dtype=float)

    def evaluate(self, points):
        return _as_points(points) @ self.matrix.T + self.offset

    def jacobian(self, points):
        pts = _as_points(points)
        return np.broadcast_to(self.matrix, (len(pts), 2, 2)).copy()


def identity_map():
    return AffineMap(np.eye(2))


def rotation_map(theta, center=(0.0, 0.0)):
    c, s = np.cos(theta), np.sin(theta)
    m = np.array([[c, -s], [s, c]])
    center = np.asarray(center, dtype=float)
    return AffineMap(m, center - m @ center)


class ShearMap(PlanarMap):
    """(x, y) -> (x + q(y), y); unit Jacobian determinant for any q."""

    def __init__(self, q, dq):
        self.q = q
        self.dq = dq

    def evaluate(self, points):
        pts = _as_points(points).copy()
        pts[:, 0] += self.q(pts[:, 1])
        return pts

    def jacobian(self, points):
        pts = _as_points(points)
        jac = np.zeros((len(pts), 2, 2))
        jac[:, 0, 0] = 1.0
        jac[:, 1, 1] = 1.0
        jac[:, 0, 1] = self.dq(pts[:, 1])
        return jac


class ComposedMap(PlanarMap):
    """outer applied after inner; Jacobians multiply by the chain rule."""

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner

    def evaluate(self, points):
        return self.outer.evaluate(self.inner.evaluate(points))

    def jacobian(self, points):
        pts = _as_points(points)
        mid = self.inner.evaluate(pts)
        return self.outer.jacobian(mid) @ self.inner.jacobian(pts)


def compose_maps(first, second):
    """Map applying `second` first, then `first`.

    Convention: pullback(compose_maps(m1, m2), w) agrees with
    pullback(m2, pullback(m1, w)).
    """
    return ComposedMap(first, second)


class GridMap(PlanarMap):
    """Displacement field sampled on a uniform grid.

    Evaluation adds the bilinearly interpolated displacement, with the
    displacement held constant beyond the grid edges (coordinates are
    clamped). The Jacobian uses central differences with the grid
    spacing as step, so it is second order in the spacing.
    """

    def __init__(self, x0, x1, y0, y1, disp_x, disp_y):
        disp_x = np.asarray(disp_x, dtype=float)
        disp_y = np.asarray(disp_y, dtype=float)
        if disp_x.shape != disp_y.shape or disp_x.ndim != 2:
            raise ValidationError("displacement grids must share a 2d shape")
        if disp_x.shape[0] < 2 or disp_x.shape[1] < 2:
            raise ValidationError("displacement grid needs 2 nodes per axis")
        if not (np.all(np.isfinite(disp_x)) and np.all(np.isfinite(disp_y))):
            raise ValidationError("displacement values must be finite")
        self.x0, self.x1, self.y0, self.y1 = (
            float(x0),
            float(x1),
            float(y0),
            float(y1),
        )
        self.nx, self.ny = disp_x.shape
        self.disp_x = disp_x
        self.disp_y = disp_y
        self.hx = (self.x1 - self.x0) / (self.nx - 1)
        self.hy = (self.y1 - self.y0) / (self.ny - 1)

    def evaluate(self, points):
        pts = _as_points(points)
        x = pts[:, 0]
        y = pts[:, 1]
        dx = _bilinear(self.disp_x, self.x0, self.y0, self.hx, self.hy, x, y)
        dy = _bilinear(self.disp_y, self.x0, self.y0, self.hx, self.hy, x, y)
        return np.column_stack([x + dx, y + dy])

    def jacobian(self, points):
        pts = _as_points(points)
        ex = np.array([self.hx, 0.0])
        ey = np.array([0.0, self.hy])
        col_x = (self.evaluate(pts + ex) - self.evaluate(pts - ex)) / (2 * self.hx)
        col_y = (self.evaluate(pts + ey) - self.evaluate(pts - ey)) / (2 * self.hy)
        return np.stack([col_x, col_y], axis=2)


def sample_map(m: PlanarMap, x0, x1, y0, y1, nx, ny) -> GridMap:
    """Sample any map onto a displacement grid."""
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])
    disp = m.evaluate(nodes) - nodes
    return GridMap(
        x0, x1, y0, y1, disp[:, 0].reshape(nx, ny), disp[:, 1].reshape(nx, ny)
    )


def serialize_map(gm: GridMap) -> str:
    lines = ["dispmap v1"]
    lines.append(
        f"{float(gm.x0)!r} {float(gm.x1)!r} {float(gm.y0)!r} {float(gm.y1)!r} "
        f"{gm.nx} {gm.ny}"
    )
    for j in range(gm.ny):
        row = []
        for i in range(gm.nx):
            row.append(f"{float(gm.disp_x[i, j])!r} {float(gm.disp_y[i, j])!r}")
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def save_map(gm: GridMap, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_map(gm))


def parse_map(text: str) -> GridMap:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    x0, x1, y0, y1, nx, ny = _parse_grid_header(lines, "dispmap")
    tokens = " ".join(lines[2:]).split()
    if len(tokens) != 2 * nx * ny:
        raise FormatError(
            f"expected {2 * nx * ny} displacement values, found {len(tokens)}"
        )
    try:
        flat = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise FormatError(f"bad displacement value: {exc}") from None
    pairs = flat.reshape(ny, nx, 2)
    return GridMap(x0, x1, y0, y1, pairs[:, :, 0].T, pairs[:, :, 1].T)


def load_map(path) -> GridMap:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_map(fh.read())


def pullback(m: PlanarMap, omega: Density) -> Density:
    """Density p -> f(m(p)) det J_m(p) on omega's grid.

    Values within UNIT_SNAP of 1 are snapped to exactly 1 so the
    support box of the result stays tight.
    """
    gx, gy = np.meshgrid(omega.xs, omega.ys, indexing="ij")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])
    mapped = m.evaluate(nodes)
    jac = m.jacobian(nodes)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    if np.any(det <= 0):
        worst = nodes[int(np.argmin(det))]
        raise ValidationError(
            f"nonpositive Jacobian determinant near ({worst[0]:.6g}, {worst[1]:.6g})"
        )
    vals = omega.value_at(mapped) * det
    vals[np.abs(vals - 1.0) < UNIT_SNAP] = 1.0
    if np.any(vals <= 0):
        raise ValidationError("pullback produced a nonpositive density value")
    return make_density(
        omega.x0, omega.x1, omega.y0, omega.y1, vals.reshape(omega.nx, omega.ny)
    )


def _row_integral(values, hx, x0, x1, outside_slope):
    """Cumulative integral along rows from x0, with the value at x = 0.

    Returns (G, G0) where G[i, j] integrates values[:, j] from x0 to
    xs[i] by the trapezoid rule and G0[j] is the integral from x0 to 0,
    extending with `outside_slope` per unit length beyond the grid.
    """
    nx = values.shape[0]
    G = cumulative_trapezoid(values, dx=hx, axis=0, initial=0.0)
    if x0 <= 0.0 <= x1:
        f = (0.0 - x0) / hx
        i = min(int(f), nx - 2)
        t = f - i
        G0 = (1 - t) * G[i] + t * G[i + 1]
    elif x1 < 0.0:
        G0 = G[-1] + outside_slope * (0.0 - x1)
    else:
        G0 = np.full(values.shape[1], outside_slope * (0.0 - x0))
    return G, G0


def primitive_diffeo(omega: Density) -> GridMap:
    """The map (x, y) -> (integral of f(s, y) for s from 0 to x, y).

    The integral uses the cumulative trapezoid rule along grid rows,
    anchored at x = 0 and extended by f = 1 outside the grid. Since
    f > 0 the map is strictly increasing in x on every row.
    """
    G, G0 = _row_integral(omega.values, omega.hx, omega.x0, omega.x1, 1.0)
    T = G - G0[None, :]
    disp_x = T - omega.xs[:, None]
    return GridMap(
        omega.x0, omega.x1, omega.y0, omega.y1, disp_x, np.zeros_like(disp_x)
    )


def _mollifier(r2):
    """Standard bump profile in the squared radius, normalized to peak 1."""
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


def _face_profiles(arr: Arrangement, omega: Density):
    """Peak-1 bump per bounded face, supported in a disc interior to it."""
    gx, gy = np.meshgrid(omega.xs, omega.ys, indexing="ij")
    profiles = []
    for face in arr.bounded_faces:
        rx, ry = face.rep_point
        eps = 0.5 * arr.boundary_distance(face, np.array([rx, ry]))
        if eps <= 0:
            raise RealizationError(
                f"no interior disc for face {face.label}: representative point "
                "touches the boundary"
            )
        r2 = ((gx - rx) ** 2 + (gy - ry) ** 2) / (eps * eps)
        profiles.append(_mollifier(r2))
    return profiles


def realize_area_vector(
    arr: Arrangement,
    target,
    base: Density | None = None,
    base_scale: float = 1.0,
    grid_n: int = DEFAULT_GRID,
    rel_tol: float = 1e-6,
) -> Density:
    """Density whose integral over face j equals target[j], built from base.

    Adds c_j times a normalized bump supported in a disc interior to
    face j, with c_j = target[j] - (current integral). The construction
    only adds mass, so every target must sit at or above the base face
    integral; pass base_scale < 1 to first carve mass out of each face
    and make room for smaller targets.
    """
    target = np.asarray(target, dtype=float)
    if base is None:
        base = density_for_curve(arr.curve, n=grid_n)
    if target.shape != (arr.r,):
        raise ValidationError(
            f"target has {target.shape} entries, arrangement has {arr.r} faces"
        )
    if np.any(target <= 0):
        raise ValidationError("target areas must be positive")
    if not 0 < base_scale <= 1:
        raise ValidationError("base_scale must lie in (0, 1]")

    profiles = _face_profiles(arr, base)
    values = np.array(base.values)
    if base_scale < 1.0:
        for prof in profiles:
            values = values * (1.0 - (1.0 - base_scale) * prof)
    carved = SimpleNamespace(
        x0=base.x0, x1=base.x1, y0=base.y0, y1=base.y1,
        nx=base.nx, ny=base.ny, values=values,
    )
    current = integrate_density_over_faces(arr, carved)

    scale = max(1.0, float(np.max(np.abs(target))))
    coeffs = target - current
    for j, c in enumerate(coeffs):
        if c < -rel_tol * scale:
            raise RealizationError(
                f"target for face {j + 1} is {current[j] - target[j]:.6g} below "
                "the base integral; the construction only adds mass "
                "(try base_scale < 1)"
            )

    out = np.array(values)
    for j, (c, prof) in enumerate(zip(coeffs, profiles)):
        weighted = SimpleNamespace(
            x0=base.x0, x1=base.x1, y0=base.y0, y1=base.y1,
            nx=base.nx, ny=base.ny, values=prof * values,
        )
        mass = integrate_density_over_faces(arr, weighted)[j]
        if mass <= 0:
            raise RealizationError(
                f"no interior disc resolved on the grid for face {j + 1}; "
                "refine the grid"
            )
        out = out + (c / mass) * prof * values

    if np.any(out <= 0):
        raise RealizationError("realized density lost positivity")
    result = make_density(base.x0, base.x1, base.y0, base.y1, out)
    achieved = integrate_density_over_faces(arr, result)
    if np.max(np.abs(achieved - target)) > 1e-9 * scale:
        raise InconsistencyError(
            "realized face integrals drifted from the target beyond roundoff"
        )
    return result


def moser_interpolation(f0: Density, f1: Density, steps: int = 64) -> GridMap:
    """Time-1 flow carrying data for f1 back to f0 along f_t = (1-t)f0 + t f1.

    The generating field is horizontal, X_t = (A / f_t, 0) with
    A(x, y) the row integral of f0 - f1 from 0 to x, so each grid row
    flows independently. Integration is classical RK4 with `steps`
    uniform time steps; the returned map satisfies
    pullback(map, f1) = f0 up to discretization error.
    """
    if not f0.same_grid(f1):
        raise ValidationError("densities must share a grid")
    if int(steps) != steps or steps < 4:
        raise ValidationError("need at least 4 time steps")
    steps = int(steps)
    if f0.nx < 4 or f0.ny < 4:
        raise ValidationError("grid too coarse for spline field evaluation")

    xs = f0.xs
    ys = f0.ys
    diff = f0.values - f1.values
    # the difference vanishes outside both support boxes, so the anchored
    # integral picks up nothing beyond the grid
    G, G0 = _row_integral(diff, f0.hx, f0.x0, f0.x1, 0.0)
    A = G - G0[None, :]

    spline_a = RectBivariateSpline(xs, ys, A, kx=3, ky=3)
    spline_0 = RectBivariateSpline(xs, ys, f0.values, kx=3, ky=3)
    spline_1 = RectBivariateSpline(xs, ys, f1.values, kx=3, ky=3)

    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    x = gx.ravel().copy()
    y = gy.ravel()

    def velocity(px, t):
        cx = np.clip(px, f0.x0, f0.x1)
        ft = (1.0 - t) * spline_0.ev(cx, y) + t * spline_1.ev(cx, y)
        if np.any(ft <= 0):
            raise InconsistencyError("interpolated density hit zero during the flow")
        return spline_a.ev(cx, y) / ft

    dt = 1.0 / steps
    t = 0.0
    for _ in range(steps):
        k1 = velocity(x, t)
        k2 = velocity(x + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = velocity(x + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = velocity(x + dt * k3, t + dt)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt

    disp_x = (x - gx.ravel()).reshape(f0.nx, f0.ny)
    return GridMap(f0.x0, f0.x1, f0.y0, f0.y1, disp_x, np.zeros_like(disp_x))


def union_box(a, b):
    """Smallest box containing both boxes (x0, x1, y0, y1)."""
    return (
        min(a[0], b[0]),
        max(a[1], b[1]),
        min(a[2], b[2]),
        max(a[3], b[3]),
    )


def support_defect(gm: GridMap, box) -> float:
    """Largest displacement at grid nodes outside the given box.

    The horizontal Moser gauge need not vanish outside the supports
    unless every row integral of f0 - f1 is zero; this measures the
    leak.
    """
    xs = np.linspace(gm.x0, gm.x1, gm.nx)
    ys = np.linspace(gm.y0, gm.y1, gm.ny)
    bx0, bx1, by0, by1 = box
    outside = (
        (xs[:, None] < bx0)
        | (xs[:, None] > bx1)
        | (ys[None, :] < by0)
        | (ys[None, :] > by1)
    )
    if not np.any(outside):
        return 0.0
    return float(
        max(np.max(np.abs(gm.disp_x[outside])), np.max(np.abs(gm.disp_y[outside])))
    )
