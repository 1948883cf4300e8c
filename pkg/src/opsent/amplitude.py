"""Decay amplitudes and the three-photon polarization state.

Amplitude tensors are indexed ``c[a, b, c]`` with index 0 for helicity +1 and
1 for helicity -1 (circular basis), or 0/1 for H/V (linear basis).  Raw matrix
elements are stored without dropping any overall constant; normalization is a
separate step.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BasisError, ZeroNormState
from .kinematics import PhotonTriple, f_factor, polarization_vector

__all__ = [
    "HELICITIES",
    "SPIN_PROJECTIONS",
    "StateTensor",
    "ClosedForm",
    "helicity_index",
    "polarizations",
    "v_tensor",
    "matrix_element",
    "state_tensor",
    "superposed_state",
    "closed_form_coefficients",
    "decay_weight",
]

# canonical iteration order, + before -
HELICITIES = tuple(itertools.product((1, -1), repeat=3))
SPIN_PROJECTIONS = (-1, 0, 1)
BASES = ("circular", "linear")
ZERO_NORM = 1e-12


def helicity_index(h):
    """Tensor index of a helicity triple, e.g. ``(+1, +1, -1) -> (0, 0, 1)``."""
    return tuple(0 if lam == 1 else 1 for lam in h)


def _check_helicities(h):
    if len(h) != 3 or any(lam not in (1, -1) for lam in h):
        raise ValueError(f"helicity triple must be three values of +-1, got {h!r}")


def _check_sz(s_z):
    if s_z not in SPIN_PROJECTIONS:
        raise ValueError(f"S_z must be one of -1, 0, +1, got {s_z!r}")


@dataclass(frozen=True, eq=False)
class StateTensor:
    """Unnormalized 2x2x2 amplitude tensor with a basis tag."""

    amplitudes: np.ndarray = field(repr=False)
    basis: str = "circular"

    def __post_init__(self):
        if self.basis not in BASES:
            raise BasisError(f"unknown basis {self.basis!r}")
        a = np.array(self.amplitudes, dtype=complex).reshape(2, 2, 2)
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "_norm", float(np.linalg.norm(a.ravel())))

    @property
    def norm(self) -> float:
        return self._norm

    def normalized(self) -> "StateTensor":
        if self.norm < ZERO_NORM:
            raise ZeroNormState(f"state norm {self.norm:.3e} below {ZERO_NORM:g}")
        return StateTensor(self.amplitudes / self.norm, self.basis)

    def vector(self) -> np.ndarray:
        """Amplitudes flattened in lexicographic ket order."""
        return self.amplitudes.reshape(8).copy()

    def __getitem__(self, h):
        if self.basis == "circular":
            return self.amplitudes[helicity_index(h)]
        return self.amplitudes[tuple(h)]

    def __eq__(self, other):
        if not isinstance(other, StateTensor):
            return NotImplemented
        return self.basis == other.basis and np.array_equal(
            self.amplitudes, other.amplitudes
        )

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "basis": self.basis,
            "amplitudes": [[c.real, c.imag] for c in self.amplitudes.reshape(8)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StateTensor":
        amps = np.array([complex(re, im) for re, im in obj["amplitudes"]])
        if amps.size != 8:
            raise ValueError("a state tensor has exactly 8 amplitudes")
        return cls(amps, obj["basis"])


def polarizations(t: PhotonTriple) -> np.ndarray:
    """Polarization vectors as an array ``[photon, helicity index, component]``."""
    eps_plus = np.array([polarization_vector(th, ph, 1) for th, ph in zip(t.theta, t.phi)])
    # eps(k, -1) = -conj(eps(k, +1))
    return np.stack([eps_plus, -eps_plus.conj()], axis=1)


def _v(eps, h):
    l1, l2, l3 = h
    e1, e2, e3 = eps[(0, 1, 2), helicity_index(h)].conj()
    return (
        (l1 - l2) * (l2 + l3) * e1 * (e2 @ e3)
        + (l2 - l3) * (l3 + l1) * e2 * (e3 @ e1)
        + (l3 - l1) * (l1 + l2) * e3 * (e1 @ e2)
    )


def v_tensor(t: PhotonTriple, h) -> np.ndarray:
    """Vector amplitude kernel ``V(k1, l1; k2, l2; k3, l3)``.

    Built from the conjugated polarization vectors; every term carries a
    helicity prefactor that vanishes for ``(+,+,+)`` and ``(-,-,-)``.
    """
    _check_helicities(h)
    return _v(polarizations(t), h)


def matrix_element(t: PhotonTriple, s_z: int, h) -> complex:
    """Matrix element for spin projection ``s_z`` along the lab z axis.

    ``-sqrt(2) V_z`` for ``s_z = 0`` and ``+-V_x + i V_y`` for ``s_z = +-1``.
    """
    _check_sz(s_z)
    return complex(_state_from_v(v_tensor(t, h), s_z))


_LAM = np.array([1.0, -1.0])
_L1, _L2, _L3 = np.meshgrid(_LAM, _LAM, _LAM, indexing="ij")
_PREF1 = (_L1 - _L2) * (_L2 + _L3)
_PREF2 = (_L2 - _L3) * (_L3 + _L1)
_PREF3 = (_L3 - _L1) * (_L1 + _L2)


def _v_all(t: PhotonTriple) -> np.ndarray:
    """V for all eight helicity triples at once, shape (2, 2, 2, 3)."""
    e1, e2, e3 = polarizations(t).conj()
    d23 = e2 @ e3.T
    d31 = e3 @ e1.T
    d12 = e1 @ e2.T
    return (
        np.einsum("abc,ai,bc->abci", _PREF1, e1, d23)
        + np.einsum("abc,bi,ca->abci", _PREF2, e2, d31)
        + np.einsum("abc,ci,ab->abci", _PREF3, e3, d12)
    )


def _state_from_v(v_all, s_z):
    if s_z == 0:
        return -math.sqrt(2.0) * v_all[..., 2]
    return s_z * v_all[..., 0] + 1j * v_all[..., 1]


def state_tensor(t: PhotonTriple, s_z: int) -> StateTensor:
    """Circular-basis state with ``c_h = matrix_element(t, s_z, h)``."""
    _check_sz(s_z)
    return _checked_state(_state_from_v(_v_all(t), s_z), t)


def _checked_state(amps, t):
    state = StateTensor(amps, "circular")
    if state.norm < ZERO_NORM:
        raise ZeroNormState(
            f"decay state vanishes (norm {state.norm:.3e}) at x = {tuple(t.energies)}"
        )
    return state


def superposed_state(t: PhotonTriple, weights) -> StateTensor:
    """``sum_s w_s * state_tensor(t, s)`` for a mapping ``{s_z: weight}``."""
    v_all = _v_all(t)
    amps = np.zeros((2, 2, 2), dtype=complex)
    for s_z, w in dict(weights).items():
        _check_sz(s_z)
        amps = amps + w * _state_from_v(v_all, s_z)
    return _checked_state(amps, t)


# ket assignment for the six closed-form coefficients, in the order written
# for the S_z = +-1 state; the S_z = 0 state uses the same kets with the
# second member of each pair carrying a minus sign
KET_TABLE = {
    "gamma1": (1, 1, -1),
    "gamma2": (-1, -1, 1),
    "beta1": (1, -1, 1),
    "beta2": (-1, 1, -1),
    "alpha1": (-1, 1, 1),
    "alpha2": (1, -1, -1),
}


@dataclass(frozen=True)
class ClosedForm:
    """Closed-form coefficients and their fit to the assembled state.

    ``global_factor`` is the least-squares complex factor ``g`` minimizing
    ``|state - g * closed|``; ``residual`` is that minimum relative to
    ``|state|``.
    """

    s_z: int
    coefficients: dict
    global_factor: complex
    residual: float

    def tensor(self) -> np.ndarray:
        amps = np.zeros((2, 2, 2), dtype=complex)
        for label, value in self.coefficients.items():
            amps[helicity_index(KET_TABLE[label])] = value
        return amps

    def to_json(self) -> dict:
        return {
            "s_z": self.s_z,
            "coefficients": {
                k: [v.real, v.imag] for k, v in self.coefficients.items()
            },
            "global_factor": [self.global_factor.real, self.global_factor.imag],
            "residual": self.residual,
        }


def _closed_values(t: PhotonTriple, s_z: int) -> dict:
    th, ph = t.theta, t.phi
    f12, f13, f23 = f_factor(t, 1, 2), f_factor(t, 1, 3), f_factor(t, 2, 3)
    if s_z == 0:
        g0 = math.sin(th[2]) * f12
        b0 = math.sin(th[1]) * f13
        a0 = math.sin(th[0]) * f23
        return {
            "gamma1": g0, "gamma2": -g0,
            "beta1": b0, "beta2": -b0,
            "alpha1": a0, "alpha2": -a0,
        }
    vals = {}
    # alpha uses theta_1; the printed alpha coefficients carry theta_2
    for name, i, f in (("gamma", 2, f12), ("beta", 1, f13), ("alpha", 0, f23)):
        phase = complex(math.cos(s_z * ph[i]), math.sin(s_z * ph[i]))
        c = math.cos(th[i])
        vals[name + "1"] = phase * (c - 1.0) * f
        vals[name + "2"] = phase * (-c - 1.0) * f
    return {k: vals[k] for k in KET_TABLE}


def closed_form_coefficients(t: PhotonTriple, s_z: int) -> ClosedForm:
    """Closed-form state coefficients and their global factor to ``state_tensor``."""
    _check_sz(s_z)
    values = {k: complex(v) for k, v in _closed_values(t, s_z).items()}
    actual = state_tensor(t, s_z).amplitudes.ravel()
    form = ClosedForm(s_z, values, 0j, math.inf)
    closed = form.tensor().ravel()
    denom = np.vdot(closed, closed).real
    if denom == 0.0:
        return form
    g = np.vdot(closed, actual) / denom
    resid = np.linalg.norm(actual - g * closed) / np.linalg.norm(actual)
    return ClosedForm(s_z, values, complex(g), float(resid))


def decay_weight(t: PhotonTriple) -> float:
    """Spin-averaged, helicity-summed ``|M|^2``: ``(1/3) sum_{S_z} sum_h |M|^2``."""
    v_all = _v_all(t)
    total = sum(
        float(np.sum(np.abs(_state_from_v(v_all, s_z)) ** 2)) for s_z in SPIN_PROJECTIONS
    )
    return total / 3.0
