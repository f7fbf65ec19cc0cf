"""
Symmetry groups and the equivalence decision
============================================

Two curves are area-equivalent when some symmetry of their shared
diagram matches their area vectors. A three-petal curve has a cyclic
symmetry of order 3, so cyclically permuted petal areas do not obstruct
equivalence while a transposition of two distinct petals does.
"""

import numpy as np

from symplane import (
    build_arrangement,
    decision_report,
    symmetry_group,
    symplectically_equivalent,
    transform_curve,
)
from symplane.curves import ClosedCurve

t = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
loop = np.column_stack([np.sin(t) + 2.0 * np.sin(2.0 * t),
                        np.cos(t) - 2.0 * np.cos(2.0 * t)])
trefoil = ClosedCurve((loop,))
arr = build_arrangement(trefoil)

group = symmetry_group(arr)
print("bounded faces:", arr.r)
print("group order:", group.order)

# A rigid rotation by 2*pi/3 maps the curve onto itself up to sampling,
# so the symplectic comparison finds a witness.
th = 2.0 * np.pi / 3.0
rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
arr_rot = build_arrangement(transform_curve(trefoil, lambda p: p @ rot.T))
decision = symplectically_equivalent(arr, arr_rot)
print()
print("trefoil vs rotated trefoil:")
print(decision_report(decision))

# A shear also preserves areas (unit Jacobian) but scrambles the shape.
shear = np.array([[1.0, 0.4], [0.0, 1.0]])
arr_shear = build_arrangement(transform_curve(trefoil, lambda p: p @ shear.T))
decision = symplectically_equivalent(arr, arr_shear)
print("trefoil vs sheared trefoil:")
print(decision_report(decision))

# Doubling all areas changes the invariant; no symmetry can repair that.
arr_big = build_arrangement(transform_curve(trefoil, lambda p: np.sqrt(2.0) * p))
decision = symplectically_equivalent(arr, arr_big)
print("trefoil vs scaled trefoil:")
print(decision_report(decision))
