"""
Transporting densities with diffeomorphisms
===========================================

Two constructions move area forms around. The primitive map absorbs a
density into the standard form along horizontal lines; the interpolation
flow carries one density to another when their horizontal line integrals
agree. Both are verified through the pullback, which is the package's
notion of "the map really does it".
"""

import numpy as np

from symplane import (
    make_density,
    moser_interpolation,
    primitive_diffeo,
    pullback,
    support_defect,
    union_box,
    unit_density,
)

n = 192
x0, x1, y0, y1 = -2.0, 2.0, -2.0, 2.0
xs = np.linspace(x0, x1, n)
ys = np.linspace(y0, y1, n)
X, Y = np.meshgrid(xs, ys, indexing="ij")


def mollifier(cx, cy, radius):
    r2 = ((X - cx) ** 2 + (Y - cy) ** 2) / radius**2
    out = np.zeros_like(X)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


# A smooth positive density equal to 1 outside a compact blob.
omega = make_density(x0, x1, y0, y1, 1.0 + 0.3 * mollifier(-0.4, 0.3, 1.3))

# primitive_diffeo(omega) pulls the standard form back to omega.
psi = primitive_diffeo(omega)
back = pullback(psi, unit_density(x0, x1, y0, y1, n, n))
print("primitive map defect:", float(np.max(np.abs(back.values - omega.values))))

# For the flow, put a bump and a matching dip on one side of x = 0 so
# every horizontal line carries zero net mass difference.
n2 = 96
xs2 = np.linspace(-0.5, 3.7, n2)
ys2 = np.linspace(-1.2, 1.2, n2)
X, Y = np.meshgrid(xs2, ys2, indexing="ij")
f0 = unit_density(-0.5, 3.7, -1.2, 1.2, n2, n2)
f1 = make_density(-0.5, 3.7, -1.2, 1.2,
                  1.0 + 0.5 * mollifier(0.8, 0.0, 0.7)
                  - 0.5 * mollifier(2.4, 0.0, 0.7))

rho = moser_interpolation(f0, f1, steps=64)
back = pullback(rho, f1)
print("flow defect:", float(np.max(np.abs(back.values - f0.values))))

# The flow is supported where the densities differ.
box = union_box(f0.support_box, f1.support_box)
print("support defect:", support_defect(rho, box))
