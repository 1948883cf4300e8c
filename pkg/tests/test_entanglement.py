import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opsent.amplitude import StateTensor, state_tensor
from opsent.entanglement import (
    CIRCULAR_TO_LINEAR,
    CUTS,
    HDET_PRODUCT_FACTOR,
    EntanglementReport,
    Tolerances,
    bipartition_schmidt,
    cayley,
    classify,
    ghz_state,
    hyperdeterminant,
    product_state,
    s_z0_hdet_product,
    s_z0_state,
    three_tangle,
    to_circular_basis,
    to_linear_basis,
    w_state,
)
from opsent.errors import BasisError, ZeroNormState
from opsent.kinematics import DalitzPoint, build_event

from conftest import events, random_events, random_unitary


def discriminant_hdet(c):
    """Hyperdeterminant as the discriminant of det(c[0] + x c[1]) in x."""
    m0, m1 = c[0], c[1]
    a = np.linalg.det(m1)
    b = m0[0, 0] * m1[1, 1] + m1[0, 0] * m0[1, 1] - m0[0, 1] * m1[1, 0] - m1[0, 1] * m0[1, 0]
    return b * b - 4.0 * np.linalg.det(m0) * a


def random_tensor(rng):
    return rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))


def local(c, u1, u2, u3):
    return np.einsum("ai,bj,ck,ijk->abc", u1, u2, u3, c)


def test_anchor_values():
    assert hyperdeterminant(ghz_state()) == pytest.approx(0.25, abs=1e-14)
    assert abs(hyperdeterminant(w_state())) < 1e-14
    assert abs(hyperdeterminant(product_state())) < 1e-14
    assert three_tangle(ghz_state()) == pytest.approx(1.0, abs=1e-14)


def test_anchor_classes():
    assert classify(ghz_state()).label == "GHZ_CLASS"
    assert classify(w_state()).label == "W_CLASS"
    assert classify(product_state()).label == "PRODUCT"


def test_cayley_matches_discriminant():
    rng = np.random.default_rng(1)
    for _ in range(500):
        c = random_tensor(rng)
        assert cayley(c) == pytest.approx(discriminant_hdet(c), rel=1e-10, abs=1e-12)


def test_cayley_is_quartic():
    rng = np.random.default_rng(2)
    c = random_tensor(rng)
    assert cayley(1.7j * c) == pytest.approx((1.7j) ** 4 * cayley(c), rel=1e-12)


def test_local_unitary_invariance():
    rng = np.random.default_rng(3)
    c = random_tensor(rng)
    s = StateTensor(c, "linear")
    ref = abs(hyperdeterminant(s))
    for _ in range(1000):
        u = [random_unitary(rng) for _ in range(3)]
        moved = StateTensor(local(c, *u), "linear")
        assert abs(abs(hyperdeterminant(moved)) - ref) < 1e-10


def test_general_linear_covariance():
    # under local maps Hdet scales by the product of squared determinants
    rng = np.random.default_rng(4)
    c = random_tensor(rng)
    g = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3)]
    scale = np.prod([np.linalg.det(m) ** 2 for m in g])
    assert cayley(local(c, *g)) == pytest.approx(scale * cayley(c), rel=1e-9)


def test_basis_round_trip_and_tags():
    rng = np.random.default_rng(5)
    s = StateTensor(random_tensor(rng), "circular")
    back = to_circular_basis(to_linear_basis(s))
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-14)
    with pytest.raises(BasisError):
        to_circular_basis(s)
    with pytest.raises(BasisError):
        to_linear_basis(to_linear_basis(s))
    u = CIRCULAR_TO_LINEAR
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-15)


def test_basis_change_keeps_modulus():
    for t in random_events(6, 50):
        s = state_tensor(t, 1)
        assert abs(hyperdeterminant(to_linear_basis(s))) == pytest.approx(
            abs(hyperdeterminant(s)), abs=1e-13
        )
        assert classify(s).class_label == classify(to_linear_basis(s)).class_label


def _normalized_abg(rng):
    a, b, g = rng.normal(size=3)
    k = math.sqrt(2 * (a * a + b * b + g * g))
    return a / k, b / k, g / k


def test_product_form_constant():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b, g = _normalized_abg(rng)
        lin = hyperdeterminant(to_linear_basis(s_z0_state(a, b, g)))
        expected = HDET_PRODUCT_FACTOR * s_z0_hdet_product(a, b, g)
        assert abs(lin - expected) < 1e-12
        # in the circular basis the same product appears without the sign
        assert abs(hyperdeterminant(s_z0_state(a, b, g)) - s_z0_hdet_product(a, b, g)) < 1e-12


@pytest.mark.parametrize(
    "a, b, g",
    [(1.0, 0.0, 1.0), (1.0, 0.0, -1.0), (1.0, 1.0, 0.0), (1.0, -1.0, 0.0), (0.0, 1.0, 1.0), (0.0, 1.0, -1.0)],
)
def test_factorizing_cases(a, b, g):
    assert s_z0_hdet_product(a, b, g) == 0.0
    report = classify(s_z0_state(a, b, g))
    assert abs(report.hyperdeterminant) < 1e-14
    assert report.label == "BISEPARABLE"
    assert report.schmidt[report.cut][1] < 1e-9


def test_other_product_roots_are_w_class():
    # a vanishing factor without a vanishing coefficient leaves a W-class state
    for a, b, g in [(1.0, 2.0, 1.0), (2.0, 1.0, 1.0), (1.0, 1.0, 2.0)]:
        assert s_z0_hdet_product(a, b, g) == 0.0
        assert classify(s_z0_state(a, b, g)).label == "W_CLASS"


def test_factorization_cut_for_vanishing_coefficient():
    # gamma = 0 leaves photon 3 unentangled
    assert classify(s_z0_state(1.0, 1.0, 0.0)).cut == "3|12"
    assert classify(s_z0_state(1.0, 0.0, 1.0)).cut == "2|13"
    assert classify(s_z0_state(0.0, 1.0, 1.0)).cut == "1|23"


@pytest.mark.parametrize("s_z", [-1, 0, 1])
def test_collinear_event_is_biseparable(s_z):
    t = build_event(DalitzPoint(1.0, 0.5))
    report = classify(state_tensor(t, s_z))
    assert report.class_label == "BISEPARABLE(1|23)"
    assert report.schmidt["1|23"][1] < 1e-9


def test_symmetric_point_tangle():
    t = build_event(DalitzPoint(2 / 3, 2 / 3))
    s = state_tensor(t, 0)
    assert three_tangle(s) == pytest.approx(1 / 3, abs=1e-12)
    assert classify(s).label == "GHZ_CLASS"


@pytest.mark.parametrize("s_z", [1, -1])
def test_symmetric_point_is_w_class(s_z):
    s = state_tensor(build_event(DalitzPoint(2 / 3, 2 / 3)), s_z)
    report = classify(s)
    assert report.label == "W_CLASS"
    assert abs(report.hyperdeterminant) < 1e-15
    for cut in CUTS:
        np.testing.assert_allclose(report.schmidt[cut], [math.sqrt(2 / 3), math.sqrt(1 / 3)], atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(events(), st.sampled_from([-1, 0, 1]))
def test_tangle_in_unit_interval(t, s_z):
    tau = three_tangle(state_tensor(t, s_z))
    assert -1e-15 <= tau <= 1 + 1e-12


def test_schmidt_coefficients_normalized():
    rng = np.random.default_rng(8)
    s = StateTensor(random_tensor(rng), "linear")
    for cut in CUTS + (1, 2, 3):
        sv = bipartition_schmidt(s, cut)
        assert np.sum(sv**2) == pytest.approx(1.0, abs=1e-14)
        assert sv[0] >= sv[1]
    np.testing.assert_array_equal(bipartition_schmidt(s, 2), bipartition_schmidt(s, "2|13"))
    with pytest.raises(ValueError):
        bipartition_schmidt(s, "12|3")
    with pytest.raises(ValueError):
        bipartition_schmidt(s, 4)


def test_biseparable_from_product_of_factors():
    rng = np.random.default_rng(9)
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    bc = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    s = StateTensor(np.einsum("i,jk->jik", a, bc), "linear")
    report = classify(s)
    assert report.class_label == "BISEPARABLE(2|13)"
    assert report.three_tangle < 1e-12


def test_zero_state_raises():
    with pytest.raises(ZeroNormState):
        classify(StateTensor(np.zeros(8), "linear"))


def test_tolerances_positive():
    with pytest.raises(ValueError):
        Tolerances(rank=0.0)
    with pytest.raises(ValueError):
        Tolerances(tangle=-1.0)


def test_report_json_round_trip():
    report = classify(state_tensor(random_events(10, 1)[0], 0))
    again = EntanglementReport.from_json(json.loads(json.dumps(report.to_json())))
    assert again == report
    assert report.to_json()["class"] == report.class_label
