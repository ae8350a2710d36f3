import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from corrflow.dynamics import Propagator, frequencies, generator_2q
from corrflow.models import coupling_general, coupling_xyz
from corrflow.pauli import density_from_tensor
from corrflow.stationary import (
    DOCUMENTED_CASES,
    POLYNOMIAL_CASES,
    NullspaceBasis,
    cubic_real_roots,
    documented_coupling,
    documented_family,
    documented_kernel_vectors,
    explicit_inequality_margins,
    family_from_nullspace,
    gamel_check,
    nullspace,
    positivity_region_membership,
    projection_residual,
    tetrahedron_vertices,
    verify_stationary,
)

PRINTED_KSEA_VERTICES = [
    (-0.0232, 0.0737, -0.0862),
    (0.1588, 0.0764, 0.1896),
    (0.1145, -0.1501, -0.1034),
    (-0.25, 0.0, 0.0),
]


def family_cases():
    out = []
    for case in POLYNOMIAL_CASES:
        for delta in ((1.0, -0.5) if case == "xyz_z_field" else (None,)):
            out.append((case, delta))
    return out


def test_nullspace_dimensions_and_zero_count():
    expected = {
        "xyz_zero_field": 4,
        "xyz_z_field": 4,
        "dm_z_field": 4,
        "ksea_z_field": 4,
        "dm_zero_field": 6,
        "ksea_zero_field": 6,
    }
    for case, dim in expected.items():
        delta = 1.0 if case == "xyz_z_field" else None
        gen = generator_2q(documented_coupling(case, delta=delta))
        basis = nullspace(gen)
        assert basis.dim == dim
        assert np.abs(gen.matrix @ basis.vectors.T).max() < 1e-10
        assert frequencies(gen).zero_count * 2 == dim


def test_nullspace_random_general_coupling(rng):
    for _ in range(5):
        j = rng.normal(size=(4, 4))
        j[0, 0] = 0.0
        assert nullspace(generator_2q(coupling_general(j))).dim == 4


def test_documented_vectors_lie_in_kernel_span():
    for case in DOCUMENTED_CASES:
        delta = 1.0 if case == "xyz_z_field" else None
        basis = nullspace(generator_2q(documented_coupling(case, delta=delta)))
        for vec in documented_kernel_vectors(case, delta):
            assert projection_residual(basis, vec) < 1e-9


def test_family_from_nullspace_xyz_zero_field():
    basis = nullspace(generator_2q(documented_coupling("xyz_zero_field")))
    family = family_from_nullspace(basis)
    assert family.n_parameters == 3
    assert_allclose(family.base, np.eye(16)[0], atol=0)
    # canonical kernel is spanned by the diagonal words; directions are 4x
    # the unit vectors at flat indices 5, 10, 15
    expected = np.zeros((3, 16))
    expected[0, 5] = expected[1, 10] = expected[2, 15] = 4.0
    assert_allclose(family.directions, expected, atol=1e-12)
    member = family.member((0.25, -0.25, 0.25))
    assert member[1, 1] == 1.0 and member[2, 2] == -1.0 and member[3, 3] == 1.0


def test_family_from_nullspace_missing_identity():
    fake = np.zeros((2, 16))
    fake[0, 5] = 1.0
    fake[1, 10] = 1.0
    with pytest.raises(ValueError):
        family_from_nullspace(NullspaceBasis(fake))


def test_documented_family_matches_printed_parametrizations():
    fam = documented_family("ksea_z_field")
    member = fam.member((0.1, 0.02, -0.05))
    x, y, z = 0.1, 0.02, -0.05
    t = member.data / 4.0  # operator-space coefficients
    assert abs(t[0, 0] - 0.25) < 1e-15
    assert abs(t[0, 1] - (z - y)) < 1e-15
    assert abs(t[1, 1] - (x + y - z)) < 1e-15
    assert abs(t[3, 3] - x) < 1e-15

    fam = documented_family("dm_z_field")
    member = fam.member((0.01, 0.02, 0.03))
    x, y, z = 0.01, 0.02, 0.03
    t = member.data / 4.0
    assert abs(t[0, 1] - (z - 2 * y)) < 1e-15
    assert abs(t[1, 2] - (x + y + z)) < 1e-15
    assert abs(t[2, 1] - (x + y - z)) < 1e-15
    assert abs(t[3, 2] - 2 * x) < 1e-15
    assert t[3, 3] == 0.0


def test_gamel_check_maximally_mixed():
    report = gamel_check(documented_family("xyz_zero_field").member((0, 0, 0)))
    # power traces of identity/4: p2 = 1/4, p3 = 1/16, p4 = 1/64
    assert_allclose(report.margins, [0.75, 0.375, 3 / 32], atol=1e-14)
    assert report.satisfied


def test_gamel_check_pure_bell_state_saturates():
    report = gamel_check(documented_family("xyz_zero_field").member((0.25, -0.25, 0.25)))
    assert_allclose(report.margins, [0, 0, 0], atol=1e-14)
    assert report.satisfied


def test_gamel_check_detects_nonpositive_operator():
    member = documented_family("xyz_zero_field").member((0.25, 0.25, 0.25))
    report = gamel_check(member)
    assert not report.satisfied
    # eigenvalue route agrees
    assert np.linalg.eigvalsh(density_from_tensor(member)).min() < -1e-6


@pytest.mark.parametrize("case,delta", family_cases())
def test_explicit_polynomials_agree_with_trace_route(case, delta, rng):
    family = documented_family(case, delta)
    for _ in range(1000):
        params = rng.uniform(-0.3, 0.3, size=3)
        margins = gamel_check(family.member(params)).margins
        poly = explicit_inequality_margins(case, params, delta)
        assert np.abs(margins - poly).max() < 1e-8


def test_positivity_region_membership_examples():
    family = documented_family("xyz_zero_field")
    on_boundary = positivity_region_membership(family, (-0.25, 0.25, 0.25))
    assert on_boundary.satisfied and abs(on_boundary.margins.min()) < 1e-10
    inside = positivity_region_membership(family, (0, 0, 0))
    assert inside.satisfied and inside.margins.min() > 0.05
    outside = positivity_region_membership(family, (0.5, 0, 0))
    assert not outside.satisfied
    assert outside.margins[0] < -0.2  # first inequality: 1/4 + 1 > 1


def test_positivity_region_membership_param_mismatch():
    family = documented_family("xyz_zero_field")
    with pytest.raises(ValueError):
        positivity_region_membership(family, (0.1, 0.2))


def test_tetrahedron_vertices_xyz_zero_field():
    q = 0.25
    assert tetrahedron_vertices("xyz_zero_field") == [
        (-q, q, q),
        (q, -q, q),
        (q, q, -q),
        (-q, -q, -q),
    ]


@pytest.mark.parametrize("delta", [1.0, -0.5])
def test_tetrahedron_vertices_xyz_z_field(delta):
    s = math.sqrt(4 + delta * delta)
    verts = tetrahedron_vertices("xyz_z_field", delta)
    assert_allclose(verts[0], (0, 0.25, -0.25), atol=1e-15)
    assert_allclose(verts[1], (0, -0.25, -0.25), atol=1e-15)
    assert_allclose(verts[2], (1 / (2 * s), -delta / (4 * s), 0.25), atol=1e-12)
    assert_allclose(verts[3], (-1 / (2 * s), delta / (4 * s), 0.25), atol=1e-12)


def test_tetrahedron_vertices_dm_forms():
    r2, r3 = math.sqrt(2), math.sqrt(3)
    den = 16 * math.sqrt(6)
    verts = tetrahedron_vertices("dm_z_field")
    assert_allclose(
        verts,
        [
            ((1 + r2 - r3) / den, (-1 + r2 + r3) / den, -4 / den),
            ((1 - r2 + r3) / den, (-1 - r2 - r3) / den, -4 / den),
            ((-1 + r2 + r3) / den, (1 + r2 - r3) / den, 4 / den),
            ((-1 - r2 - r3) / den, (1 - r2 + r3) / den, 4 / den),
        ],
        atol=1e-15,
    )


def test_tetrahedron_vertices_ksea_match_printed_decimals():
    verts = tetrahedron_vertices("ksea_z_field")
    for printed in PRINTED_KSEA_VERTICES:
        best = min(max(abs(a - b) for a, b in zip(v, printed)) for v in verts)
        assert best < 1e-3
    # roots satisfy their cubics essentially exactly
    coeff_sets = ((2368, -592, 28, 1), (1184, 0, -20, 1), (592, 0, -16, -1))
    for axis, coeffs in enumerate(coeff_sets):
        for v in verts[:3]:
            x = v[axis]
            a, b, c, d = coeffs
            assert abs(((a * x + b) * x + c) * x + d) < 1e-12


@pytest.mark.parametrize("case,delta", family_cases())
def test_tetrahedron_vertices_on_boundary_and_scaled_outside(case, delta):
    family = documented_family(case, delta)
    verts = np.array(tetrahedron_vertices(case, delta))
    centroid = verts.mean(axis=0)
    for v in verts:
        margins = gamel_check(family.member(v)).margins
        assert margins.min() > -1e-8
        assert abs(margins.min()) < 1e-8
        inflated = gamel_check(family.member(centroid + 1.05 * (v - centroid)))
        assert not inflated.satisfied


def test_cubic_real_roots_examples():
    assert_allclose(cubic_real_roots(1, 0, 0, -1), [1.0], atol=1e-14)
    ys = cubic_real_roots(1184, 0, -20, 1)
    assert len(ys) == 3
    assert abs(sum(ys)) < 1e-12
    assert min(abs(y + 0.1501) for y in ys) < 1e-4
    zs = cubic_real_roots(592, 0, -16, -1)
    assert_allclose(zs, sorted([-0.0862, 0.1896, -0.1034]), atol=1e-4)
    with pytest.raises(ValueError):
        cubic_real_roots(0, 1, 2, 3)


def test_verify_stationary():
    family = documented_family("xyz_zero_field")
    gen = generator_2q(documented_coupling("xyz_zero_field"))
    assert verify_stationary(family, gen, (0.1, -0.05, 0.2), [0.0])
    assert verify_stationary(family, gen, (0.1, -0.05, 0.2), [0.7, 3.1])
    # leave the kernel: perturb along a non-stationary direction
    perturbed = family.member((0.1, -0.05, 0.2)).data.copy()
    perturbed[1, 0] += 0.05
    from corrflow.pauli import CorrelationTensor
    from corrflow.stationary import StationaryFamily

    fake = StationaryFamily(
        base=perturbed.reshape(-1),
        directions=np.zeros((0, 16)),
        parameter_names=(),
        n_qubits=2,
    )
    assert not verify_stationary(fake, gen, (), [0.7, 3.1])


def test_verify_stationary_random_members(rng):
    for case in DOCUMENTED_CASES:
        delta = -0.5 if case == "xyz_z_field" else None
        family = documented_family(case, delta)
        gen = generator_2q(documented_coupling(case, delta=delta))
        prop = Propagator(gen)
        for _ in range(20):
            params = rng.uniform(-0.04, 0.04, size=family.n_parameters)
            flat = family.member(params).ravel()
            evolved = prop.propagate_array(flat, np.array([0.9, 4.2]))
            assert np.abs(evolved - flat).max() < 1e-10


def test_xyz_z_field_delta_dependence():
    # the x-direction of the family tilts with delta = (j1 - j2) / b
    for delta in (0.7, -1.3):
        family = documented_family("xyz_z_field", delta)
        gen = generator_2q(documented_coupling("xyz_z_field", delta=delta))
        assert verify_stationary(family, gen, (0.05, 0.01, -0.03), [1.1, 2.3])
