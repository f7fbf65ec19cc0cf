"""
Dimensions of local moduli spaces
=================================

For curves with catalogued degenerate points, the classifying invariant
gains finitely many continuous parameters: one block per singular point
plus one area per bounded face, minus one on a surface of finite total
area where the outer region is a face too.
"""

from symplane import CATALOG, CurveSpec, Surface, moduli_dimension, singularity_by_name

print("catalogued local types:")
for name, t in sorted(CATALOG.items()):
    print(f"  {name}: dimension {t.dimension}, {t.normal_form}")

# An injective curve (one bounded face) with a single E24 point.
spec = CurveSpec(r=1, unstable_points=(singularity_by_name("E24"),))
print()
print("E24 on an injective loop:", moduli_dimension(spec))

# A generic immersion contributes nothing locally; the dimension is the
# number of bounded faces.
print("generic immersion, r=4:", moduli_dimension(CurveSpec(r=4)))

# On a bounded surface the total area is fixed, removing one parameter.
spec = CurveSpec(r=2, surface=Surface.BOUNDED_SURFACE)
print("bounded surface, r=2:", moduli_dimension(spec))

# Contributions add across singular points.
spec = CurveSpec(
    r=2,
    unstable_points=(singularity_by_name("E12"), singularity_by_name("W18")),
)
print("E12 + W18, r=2:", moduli_dimension(spec))
