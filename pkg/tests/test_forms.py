"""Density grids, pullbacks, the primitive map, realization, Moser flow."""

from __future__ import annotations

import numpy as np
import pytest
from conftest import circle_curve, conveyor_pair, gerono_curve, trefoil_curve

from symplane.arrangement import build_arrangement, face_areas, integrate_density_over_faces
from symplane.errors import FormatError, RealizationError, ValidationError
from symplane.forms import (
    AffineMap,
    Density,
    GridMap,
    ShearMap,
    compose_maps,
    density_for_curve,
    identity_map,
    infer_support_box,
    load_density,
    load_map,
    make_density,
    moser_interpolation,
    parse_density,
    primitive_diffeo,
    pullback,
    realize_area_vector,
    rotation_map,
    sample_map,
    save_density,
    save_map,
    support_defect,
    union_box,
    unit_density,
)


def bump_values(n, L, bumps):
    """Ones plus peak-1 mollifier bumps given as (amp, R, cx, cy)."""
    xs = np.linspace(-L, L, n)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    vals = np.ones((n, n))
    for amp, R, cx, cy in bumps:
        r2 = ((gx - cx) ** 2 + (gy - cy) ** 2) / (R * R)
        prof = np.zeros_like(r2)
        inside = r2 < 1
        prof[inside] = np.exp(1 - 1 / (1 - r2[inside]))
        vals += amp * prof
    return vals


def smooth_bump_density(n=128, L=2.0):
    # same profile the acceptance round trip uses, at module-test resolution
    return make_density(-L, L, -L, L, bump_values(n, L, [(0.3, 1.3, -0.4, 0.3), (0.2, 1.0, 0.7, -0.5)]))


def zero_row_pair(n=128, a=0.5, R=0.7):
    """f0 = 1 and f1 with a dip and a bump sharing every horizontal line.

    Both discs sit in x > 0: the flow primitive integrates f0 - f1 from
    x = 0, so an anchor between the discs would leave the field nonzero
    far to either side even though every full row integral vanishes.
    """
    xs = np.linspace(-0.5, 3.7, n)
    gx, gy = np.meshgrid(xs, np.linspace(-2.1, 2.1, n), indexing="ij")
    vals = np.ones((n, n))
    for amp, cx in ((-a, 0.8), (a, 2.4)):
        r2 = ((gx - cx) ** 2 + gy**2) / (R * R)
        prof = np.zeros_like(r2)
        inside = r2 < 1
        prof[inside] = np.exp(1 - 1 / (1 - r2[inside]))
        vals += amp * prof
    return (
        make_density(-0.5, 3.7, -2.1, 2.1, np.ones((n, n))),
        make_density(-0.5, 3.7, -2.1, 2.1, vals),
    )


# --- Density type ---------------------------------------------------------


def test_density_rejects_stray_values_outside_support_box():
    vals = np.ones((8, 8))
    vals[0, 0] = 2.0
    with pytest.raises(ValidationError):
        Density(0, 1, 0, 1, 8, 8, vals, (0.5, 0.9, 0.5, 0.9))


def test_density_rejects_nonpositive_values():
    vals = np.ones((8, 8))
    vals[3, 3] = 0.0
    with pytest.raises(ValidationError):
        make_density(0, 1, 0, 1, vals)


def test_support_box_inference():
    d = smooth_bump_density(n=64)
    sx0, sx1, sy0, sy1 = d.support_box
    # the mollifier tails underflow to zero a little inside the stated radius
    assert -1.8 < sx0 < -1.5 and 1.5 < sx1 < 1.8
    flat = unit_density(0, 1, 0, 1, 16, 16)
    sx0, sx1, sy0, sy1 = flat.support_box
    assert sx0 == sx1 and sy0 == sy1


def test_value_at_nodes_and_outside():
    d = smooth_bump_density(n=64)
    pts = np.column_stack([d.xs[7] * np.ones(3), d.ys[[3, 9, 40]]])
    assert np.allclose(d.value_at(pts), d.values[7, [3, 9, 40]], rtol=0, atol=1e-12)
    assert d.value_at([(99.0, 0.0)])[0] == 1.0


def test_density_file_round_trip(tmp_path):
    d = smooth_bump_density(n=48)
    path = tmp_path / "d.txt"
    save_density(d, path)
    back = load_density(path)
    assert back.same_grid(d)
    assert np.array_equal(back.values, d.values)
    assert back.support_box == d.support_box


@pytest.mark.parametrize(
    "text",
    [
        "densty v1\n0 1 0 1 4 4\n" + "1 " * 16,
        "density v1\n0 1 0 1 4\n" + "1 " * 16,
        "density v1\n0 1 0 1 4 4\n" + "1 " * 15,
        "density v1\n0 1 0 1 4 4\n" + "1 " * 15 + "frog",
    ],
)
def test_parse_density_rejects_malformed(text):
    with pytest.raises(FormatError):
        parse_density(text)


# --- pullback -------------------------------------------------------------


def test_pullback_identity_returns_same_values():
    d = smooth_bump_density(n=64)
    back = pullback(identity_map(), d)
    assert np.max(np.abs(back.values - d.values)) < 1e-12


def test_pullback_axis_stretch_gives_constant_two():
    pb = pullback(AffineMap([[2, 0], [0, 1]]), unit_density(-2, 2, -2, 2, 64, 64))
    assert np.all(pb.values == 2.0)


def test_pullback_shear_keeps_unit_density():
    sh = ShearMap(lambda y: 0.3 * np.sin(y), lambda y: 0.3 * np.cos(y))
    pb = pullback(sh, unit_density(-2, 2, -2, 2, 64, 64))
    assert np.max(np.abs(pb.values - 1.0)) < 1e-9


def test_pullback_rejects_orientation_reversal():
    with pytest.raises(ValidationError):
        AffineMap([[1, 0], [0, -1]])
    # a grid map that folds the plane has negative determinant somewhere
    xs = np.linspace(-1, 1, 16)
    fold = GridMap(-1, 1, -1, 1, np.tile(-2 * xs[:, None], (1, 16)), np.zeros((16, 16)))
    with pytest.raises(ValidationError):
        pullback(fold, unit_density(-1, 1, -1, 1, 16, 16))


def test_pullback_functoriality_closed_form():
    m1 = AffineMap([[2, 0.3], [0, 1]], (0.1, -0.2))
    m2 = ShearMap(lambda y: 0.4 * np.sin(y), lambda y: 0.4 * np.cos(y))
    om = unit_density(-2, 2, -2, 2, 64, 64)
    direct = pullback(compose_maps(m1, m2), om)
    staged = pullback(m2, pullback(m1, om))
    # rim nodes map outside the grid, where the staged intermediate
    # falls back to the constant-1 extension; compare the interior
    assert np.max(np.abs(direct.values[8:-8, 8:-8] - staged.values[8:-8, 8:-8])) < 1e-8


def test_pullback_functoriality_sampled_density():
    # resampling the intermediate density costs O(h^2), not exactness
    m1 = rotation_map(0.3)
    m2 = ShearMap(lambda y: 0.2 * np.sin(y), lambda y: 0.2 * np.cos(y))
    om = smooth_bump_density(n=192)
    direct = pullback(compose_maps(m1, m2), om)
    staged = pullback(m2, pullback(m1, om))
    assert np.max(np.abs(direct.values - staged.values)) < 5e-3


def test_pullback_scales_linearly():
    om = smooth_bump_density(n=96)
    scaled = Density(
        om.x0, om.x1, om.y0, om.y1, om.nx, om.ny, 2.5 * om.values,
        (om.x0, om.x1, om.y0, om.y1),
    )
    sh = ShearMap(lambda y: 0.3 * np.sin(y), lambda y: 0.3 * np.cos(y))
    a = pullback(sh, scaled).values
    b = 2.5 * pullback(sh, om).values
    # compare away from the rim: outside the grid the extension is 1, not 2.5
    assert np.allclose(a[10:-10, 10:-10], b[10:-10, 10:-10], rtol=1e-12, atol=0)


# --- primitive map --------------------------------------------------------


def test_primitive_diffeo_of_unit_density_is_identity():
    psi = primitive_diffeo(unit_density(-2, 2, -2, 2, 64, 64))
    assert np.max(np.abs(psi.disp_x)) < 1e-10
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2, 2, size=(40, 2))
    assert np.max(np.abs(psi.evaluate(pts) - pts)) < 1e-10


def test_primitive_diffeo_of_constant_two_doubles_x():
    two = Density(-1, 1, -1, 1, 32, 32, 2 * np.ones((32, 32)), (-1, 1, -1, 1))
    psi = primitive_diffeo(two)
    pts = np.column_stack([np.linspace(-0.9, 0.9, 11), np.linspace(-0.5, 0.5, 11)])
    mapped = psi.evaluate(pts)
    assert np.max(np.abs(mapped[:, 0] - 2 * pts[:, 0])) < 1e-12
    assert np.array_equal(mapped[:, 1], pts[:, 1])


def test_primitive_round_trip_at_module_resolution():
    om = smooth_bump_density(n=128)
    back = pullback(primitive_diffeo(om), unit_density(-2, 2, -2, 2, 128, 128))
    assert np.max(np.abs(back.values - om.values)) < 2e-3


def test_primitive_anchor_away_from_origin():
    # grid strictly right of x = 0: the anchored integral crosses f = 1 territory
    vals = np.ones((32, 32))
    om = Density(1.0, 3.0, -1.0, 1.0, 32, 32, vals, (2.0, 2.0, 0.0, 0.0))
    psi = primitive_diffeo(om)
    pts = np.array([(1.5, 0.2), (2.5, -0.3)])
    assert np.max(np.abs(psi.evaluate(pts) - pts)) < 1e-10


# --- sampled maps and files -----------------------------------------------


def test_sample_map_reproduces_affine_exactly():
    m = AffineMap([[1.2, 0.1], [0.0, 0.9]], (0.3, -0.1))
    gm = sample_map(m, -1, 1, -1, 1, 24, 24)
    rng = np.random.default_rng(11)
    pts = rng.uniform(-1, 1, size=(50, 2))
    # affine displacement is linear, so bilinear interpolation is exact
    assert np.max(np.abs(gm.evaluate(pts) - m.evaluate(pts))) < 1e-12


def test_map_file_round_trip(tmp_path):
    gm = sample_map(rotation_map(0.5), -1, 1, -1, 1, 12, 12)
    path = tmp_path / "m.txt"
    save_map(gm, path)
    back = load_map(path)
    assert np.array_equal(back.disp_x, gm.disp_x)
    assert np.array_equal(back.disp_y, gm.disp_y)
    assert (back.x0, back.x1, back.y0, back.y1) == (gm.x0, gm.x1, gm.y0, gm.y1)


# --- realize_area_vector --------------------------------------------------


def test_realize_noop_when_target_matches():
    arr = build_arrangement(circle_curve(n=128))
    base = density_for_curve(arr.curve, n=96)
    current = integrate_density_over_faces(arr, base)
    out = realize_area_vector(arr, current, base=base)
    assert np.array_equal(out.values, base.values)


def test_realize_circle_target():
    arr = build_arrangement(circle_curve(n=128))
    out = realize_area_vector(arr, [2 * np.pi], grid_n=128)
    got = integrate_density_over_faces(arr, out)
    assert abs(got[0] - 2 * np.pi) < 1e-3 * 2 * np.pi


def test_realize_trefoil_bumps_one_face_only(trefoil512):
    arr = build_arrangement(trefoil512)
    base = density_for_curve(arr.curve, n=192)
    current = integrate_density_over_faces(arr, base)
    target = current.copy()
    target[0] += 1.0
    out = realize_area_vector(arr, target, base=base)
    got = integrate_density_over_faces(arr, out)
    assert abs(got[0] - current[0] - 1.0) < 1e-6
    assert np.max(np.abs(got[1:] - current[1:])) < 1e-6


def test_realize_random_cone_targets_reproduce_tightly(gerono256):
    arr = build_arrangement(gerono256)
    base = density_for_curve(arr.curve, n=160)
    current = integrate_density_over_faces(arr, base)
    rng = np.random.default_rng(2024)
    for _ in range(5):
        target = current + rng.uniform(0.0, 2.0, size=arr.r)
        out = realize_area_vector(arr, target, base=base)
        got = integrate_density_over_faces(arr, out)
        assert np.max(np.abs(got - target)) < 1e-9 * max(1.0, target.max())


def test_realize_rejects_shrinking_target_without_base_scale():
    arr = build_arrangement(circle_curve(n=128))
    base = density_for_curve(arr.curve, n=128)
    current = integrate_density_over_faces(arr, base)
    with pytest.raises(RealizationError):
        realize_area_vector(arr, current - 0.2, base=base)


def test_realize_base_scale_makes_room():
    arr = build_arrangement(circle_curve(n=128))
    base = density_for_curve(arr.curve, n=128)
    current = integrate_density_over_faces(arr, base)
    target = current - 0.2
    out = realize_area_vector(arr, target, base=base, base_scale=0.2)
    got = integrate_density_over_faces(arr, out)
    assert np.max(np.abs(got - target)) < 1e-9


def test_realize_rejects_wrong_target_length(gerono256):
    arr = build_arrangement(gerono256)
    with pytest.raises(ValidationError):
        realize_area_vector(arr, [1.0, 2.0, 3.0], grid_n=64)


# --- Moser interpolation --------------------------------------------------


def test_moser_identity_pair_is_identity():
    f = smooth_bump_density(n=64)
    rho = moser_interpolation(f, f, steps=8)
    assert np.array_equal(rho.disp_x, np.zeros((64, 64)))


def test_moser_validates_inputs():
    f0, f1 = zero_row_pair(n=32)
    with pytest.raises(ValidationError):
        moser_interpolation(f0, f1, steps=3)
    other = unit_density(-2.5, 2.5, -2.5, 2.5, 48, 48)
    with pytest.raises(ValidationError):
        moser_interpolation(f0, other, steps=8)


def test_moser_contract_and_positive_jacobian():
    f0, f1 = zero_row_pair(n=128)
    rho = moser_interpolation(f0, f1, steps=64)
    back = pullback(rho, f1)
    assert np.max(np.abs(back.values - f0.values)) < 1e-2
    rng = np.random.default_rng(5)
    pts = rng.uniform(-2.2, 2.2, size=(200, 2))
    jac = rho.jacobian(pts)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    assert np.min(det) > 0


def test_moser_flat_to_bumped_tight_contract():
    """f0 = 1 against a bump/dip pair of compact polynomial profile.

    (1 - r^2)^4 discs keep the rim derivatives far milder than the
    mollifier profile, so 256^2 already puts the pullback defect at
    64 steps under half the 1e-3 budget.
    """
    n, a, R = 256, 0.3, 0.9
    xs = np.linspace(-0.5, 3.7, n)
    gx, gy = np.meshgrid(xs, np.linspace(-2.1, 2.1, n), indexing="ij")
    vals = np.ones((n, n))
    for amp, cx in ((-a, 0.8), (a, 2.4)):
        r2 = ((gx - cx) ** 2 + gy**2) / (R * R)
        vals += amp * np.where(r2 < 1, (1 - np.minimum(r2, 1)) ** 4, 0.0)
    f0 = make_density(-0.5, 3.7, -2.1, 2.1, np.ones((n, n)))
    f1 = make_density(-0.5, 3.7, -2.1, 2.1, vals)
    rho = moser_interpolation(f0, f1, steps=64)
    back = pullback(rho, f1)
    assert np.max(np.abs(back.values - f0.values)) <= 1e-3


def test_moser_step_doubling_cuts_defect():
    # conveyor pair: spatial floor ~1e-4, RK4 term dominates at 64 steps
    f0, f1 = conveyor_pair(eps=0.17)
    d64 = np.max(np.abs(pullback(moser_interpolation(f0, f1, steps=64), f1).values
                        - f0.values))
    d128 = np.max(np.abs(pullback(moser_interpolation(f0, f1, steps=128), f1).values
                         - f0.values))
    assert d64 / d128 >= 3.0
    assert d64 <= 1e-3


def test_moser_zero_row_integrals_keep_support():
    f0, f1 = zero_row_pair(n=128)
    rho = moser_interpolation(f0, f1, steps=16)
    box = union_box(f0.support_box, f1.support_box)
    assert support_defect(rho, box) < 1e-9


def test_moser_unbalanced_rows_leak_support():
    # a single bump has nonzero row integrals: the horizontal gauge
    # displaces points all the way to the right edge
    n = 96
    f1 = make_density(-2.5, 2.5, -2.5, 2.5, bump_values(n, 2.5, [(0.5, 0.8, 0.0, 0.0)]))
    f0 = unit_density(-2.5, 2.5, -2.5, 2.5, n, n)
    rho = moser_interpolation(f0, f1, steps=16)
    box = union_box(f0.support_box, f1.support_box)
    assert support_defect(rho, box) > 1e-4
