import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opsent.amplitude import state_tensor
from opsent.correlations import (
    PAULI,
    QUBIT_2D,
    SPIN1,
    SPIN1_3D,
    AnalyzerSetting,
    correlation_2d,
    correlation_3d,
    correlation_tensor,
    deformed_correlation_closed,
    deformed_linear_pair,
    deformed_singlet,
    embed_3d,
    mermin_value,
    para_state,
    projected_local_basis,
    qubit_correlation,
    spin1_eigen,
    spin1_matrix,
    svetlichny_value,
    two_qubit_correlation,
)
from opsent.entanglement import ghz_state, product_state, w_state
from opsent.errors import BasisError, ZeroNormState
from opsent.kinematics import DalitzPoint, Orientation, build_event

from conftest import random_events, random_unit

X, Y, Z = np.eye(3)


def planar_axis(phi):
    return np.array([math.cos(phi), math.sin(phi), 0.0])


# analytic optimum for GHZ: unprimed axes at -pi/6, primed at +pi/3
GHZ_SETTINGS = [(planar_axis(-math.pi / 6), planar_axis(math.pi / 3))] * 3


def test_deformed_singlet_closed_form_matches_operator():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        alpha = rng.uniform(0, 2 * math.pi)
        a, b = random_unit(rng, 2)
        d = deformed_correlation_closed(alpha, a, b) - two_qubit_correlation(
            deformed_singlet(alpha), a, b
        )
        worst = max(worst, abs(d))
    assert worst < 1e-12


def test_singlet_reduction():
    rng = np.random.default_rng(2)
    for a, b in random_unit(rng, (100, 2)):
        assert deformed_correlation_closed(0.0, a, b) == pytest.approx(-0.25 * a @ b, abs=1e-15)
        assert two_qubit_correlation(deformed_singlet(0.0), a, b) == pytest.approx(
            -0.25 * a @ b, abs=1e-15
        )


def test_deformed_tensor_entries():
    alpha = 0.7
    c, s = math.cos(alpha), math.sin(alpha)
    expected = np.array([[-c, s, 0], [-s, -c, 0], [0, 0, -1]]) / 4
    got = np.array([[two_qubit_correlation(deformed_singlet(alpha), a, b) for b in (X, Y, Z)] for a in (X, Y, Z)])
    np.testing.assert_allclose(got, expected, atol=1e-15)


def test_linear_pair_is_shifted_singlet():
    rng = np.random.default_rng(3)
    for alpha in rng.uniform(0, 2 * math.pi, 20):
        a, b = random_unit(rng, 2)
        assert two_qubit_correlation(deformed_linear_pair(alpha), a, b) == pytest.approx(
            deformed_correlation_closed(alpha + math.pi, a, b), abs=1e-14
        )


def test_para_state_values():
    psi = para_state()
    assert two_qubit_correlation(psi, X, X) == pytest.approx(-0.25, abs=1e-15)
    assert two_qubit_correlation(psi, Y, Y) == pytest.approx(0.25, abs=1e-15)
    assert two_qubit_correlation(psi, Z, Z) == pytest.approx(0.25, abs=1e-15)


def test_bare_and_halved_pauli_differ_by_four():
    rng = np.random.default_rng(4)
    for _ in range(100):
        psi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a, b = random_unit(rng, 2)
        assert qubit_correlation(psi, [a, b]) == pytest.approx(
            4 * two_qubit_correlation(psi, a, b), abs=1e-13
        )


def test_non_unit_axis_rejected():
    with pytest.raises(ValueError):
        two_qubit_correlation(para_state(), [1.0, 1.0, 0.0], Z)
    with pytest.raises(ZeroNormState):
        two_qubit_correlation(np.zeros((2, 2)), X, Z)


def test_pauli_and_spin1_algebra():
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        for gens in (PAULI / 2, SPIN1):
            comm = gens[i] @ gens[j] - gens[j] @ gens[i]
            assert np.max(np.abs(comm - 1j * gens[k])) < 1e-13
    casimir = sum(s @ s for s in SPIN1)
    np.testing.assert_allclose(casimir, 2 * np.eye(3), atol=1e-15)


@pytest.mark.parametrize(
    "axis, vec, value",
    [
        (Z, [1, 1j, 0], 1),
        (Z, [1, -1j, 0], -1),
        (X, [0, 1j, 1], -1),
        (X, [0, -1j, 1], 1),
        (Y, [1j, 0, 1], 1),
        (Y, [-1j, 0, 1], -1),
        (Z, [0, 0, 1], 0),
    ],
)
def test_spin1_eigenvectors(axis, vec, value):
    v = np.array(vec, dtype=complex)
    np.testing.assert_allclose(spin1_matrix(axis) @ v, value * v, atol=1e-15)


def test_spin1_eigen_convention():
    rng = np.random.default_rng(5)
    for axis in [X, Y, Z, *random_unit(rng, 20)]:
        w, v = spin1_eigen(axis)
        np.testing.assert_array_equal(w, [-1.0, 0.0, 1.0])
        m = spin1_matrix(axis)
        np.testing.assert_allclose(m @ v, v * w, atol=1e-13)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-13)
        for k in range(3):
            col = v[:, k]
            lead = col[np.argmax(np.abs(col) > 1e-12)]
            assert abs(lead.imag) < 1e-15 and lead.real > 0


def test_embed_is_transverse_and_isometric():
    for t in random_events(6, 30):
        for s_z in (-1, 0, 1):
            s = state_tensor(t, s_z)
            psi = embed_3d(s, t)
            assert np.linalg.norm(psi) == pytest.approx(s.norm, rel=1e-12)
            k1, k2, k3 = t.directions
            assert np.max(np.abs(np.einsum("a,abc->bc", k1, psi))) < 1e-12 * s.norm
            assert np.max(np.abs(np.einsum("b,abc->ac", k2, psi))) < 1e-12 * s.norm
            assert np.max(np.abs(np.einsum("c,abc->ab", k3, psi))) < 1e-12 * s.norm


def test_correlation_3d_rotation_invariance():
    rng = np.random.default_rng(7)
    for t in random_events(8, 30):
        psi = embed_3d(state_tensor(t, 1), t)
        r = Orientation(*rng.uniform(0, 2 * math.pi, 3)).matrix
        moved = np.einsum("ai,bj,ck,ijk->abc", r, r, r, psi)
        a, b, c = random_unit(rng, 3)
        assert correlation_3d(moved, r @ a, r @ b, r @ c) == pytest.approx(
            correlation_3d(psi, a, b, c), abs=1e-10
        )


def test_correlation_3d_dense_oracle():
    rng = np.random.default_rng(9)
    t = random_events(10, 1)[0]
    psi = embed_3d(state_tensor(t, 0), t).reshape(27)
    for a, b, c in random_unit(rng, (10, 3)):
        op = np.kron(np.kron(spin1_matrix(a), spin1_matrix(b)), spin1_matrix(c))
        dense = (np.vdot(psi, op @ psi) / np.vdot(psi, psi)).real
        assert correlation_3d(psi, a, b, c) == pytest.approx(dense, abs=1e-14)


def test_correlation_3d_regression():
    # values frozen from the dense 27x27 Kronecker oracle
    sym = build_event(DalitzPoint(2 / 3, 2 / 3))
    psi = embed_3d(state_tensor(sym, 0), sym)
    assert abs(correlation_3d(psi, Z, Z, Z)) < 1e-15
    t = build_event(DalitzPoint(0.8, 0.7), Orientation(0.3, 1.0, 0.5))
    psi = embed_3d(state_tensor(t, 1), t)
    assert correlation_3d(psi, Z, Z, Z) == pytest.approx(-0.0026090065358821846, rel=1e-10)


def test_correlation_tensor_is_trilinear_form():
    rng = np.random.default_rng(11)
    t = random_events(12, 1)[0]
    s = state_tensor(t, -1)
    psi = embed_3d(s, t)
    t2 = correlation_tensor(s)
    t3 = correlation_tensor(psi, SPIN1_3D)
    for a, b, c in random_unit(rng, (20, 3)):
        setting = AnalyzerSetting(np.array([a, b, c]))
        assert np.einsum("ijk,i,j,k->", t2, a, b, c) == pytest.approx(correlation_2d(s, setting), abs=1e-13)
        assert np.einsum("ijk,i,j,k->", t3, a, b, c) == pytest.approx(
            correlation_3d(psi, a, b, c), abs=1e-13
        )


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_correlator_multilinear(u, v):
    # linear in each axis, checked through the tensor form
    rng = np.random.default_rng(13)
    tensor = correlation_tensor(w_state())
    a1, a2, b, c = random_unit(rng, 4)
    lhs = np.einsum("ijk,i,j,k->", tensor, u * a1 + v * a2, b, c)
    rhs = u * np.einsum("ijk,i,j,k->", tensor, a1, b, c) + v * np.einsum("ijk,i,j,k->", tensor, a2, b, c)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_ghz_mermin_analytic_settings():
    ghz = ghz_state()

    def corr(a, b, c):
        return correlation_2d(ghz, AnalyzerSetting(np.array([a, b, c])))

    u, p = GHZ_SETTINGS[0]
    for axes, sign in [((u, u, p), 1), ((u, p, u), 1), ((p, u, u), 1), ((p, p, p), -1)]:
        assert corr(*axes) == pytest.approx(sign, abs=1e-12)
    assert mermin_value(corr, GHZ_SETTINGS) == pytest.approx(4.0, abs=1e-12)


def test_product_state_mermin_bounded():
    rng = np.random.default_rng(14)
    s = product_state()

    def corr(a, b, c):
        return qubit_correlation(s.amplitudes, [a, b, c])

    for _ in range(100):
        axes = random_unit(rng, (3, 2))
        assert abs(mermin_value(corr, axes)) <= 2.0 + 1e-12


def test_svetlichny_is_sum_of_mermin_pair():
    rng = np.random.default_rng(15)
    s = w_state()

    def corr(a, b, c):
        return qubit_correlation(s.amplitudes, [a, b, c])

    axes = random_unit(rng, (3, 2))
    swapped = [(p[1], p[0]) for p in axes]
    assert svetlichny_value(corr, axes) == pytest.approx(
        mermin_value(corr, axes) + mermin_value(corr, swapped), abs=1e-14
    )


def test_local_bases_change_the_measurement():
    # measuring GHZ through Hadamards on every photon equals measuring rotated axes
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    s = ghz_state()
    setting = AnalyzerSetting(np.array([X, X, Z]), local_bases=(h, h, h))
    plain = AnalyzerSetting(np.array([Z, Z, X]))
    assert correlation_2d(s, setting) == pytest.approx(correlation_2d(s, plain), abs=1e-14)


def test_projected_basis_orthonormal_only_along_dropped_axis():
    t = build_event(DalitzPoint(0.8, 0.7), Orientation(0.0, math.pi / 2, 0.0))
    # photon 1 now moves along -z
    basis = projected_local_basis(t, 1)
    AnalyzerSetting(np.array([X, Y, Z]), local_bases=(basis, np.eye(2), np.eye(2)))
    with pytest.raises(BasisError):
        AnalyzerSetting(
            np.array([X, Y, Z]), local_bases=(projected_local_basis(t, 2), np.eye(2), np.eye(2))
        )


def test_setting_validation_and_json():
    with pytest.raises(ValueError):
        AnalyzerSetting(np.array([X, Y, [1.0, 1.0, 0.0]]))
    with pytest.raises(ValueError):
        AnalyzerSetting(np.array([X, Y, Z]), formalism="jones")
    with pytest.raises(BasisError):
        AnalyzerSetting(np.array([X, Y, Z]), SPIN1_3D, (np.eye(2),) * 3)
    with pytest.raises(BasisError):
        correlation_2d(ghz_state(), AnalyzerSetting(np.array([X, Y, Z]), SPIN1_3D))
    h = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
    for setting in (
        AnalyzerSetting(np.array([X, Y, Z])),
        AnalyzerSetting(np.array([X, Y, Z]), QUBIT_2D, (h, np.eye(2), h)),
    ):
        again = AnalyzerSetting.from_json(json.loads(json.dumps(setting.to_json())))
        assert again == setting
