"""Polarization correlation functions in the qubit and spin-1 formalisms.

Two conventions coexist on purpose.  Two-party correlators use spin
operators ``S = sigma / 2`` (so the singlet gives ``-a.b / 4``); three-party
qubit correlators use bare Pauli matrices, which is what the Mermin and
Svetlichny combinations are written for.  The spin-1 correlators act on
3-vector polarization states with ``(S_i)_jk = -i eps_ijk``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitude import StateTensor, polarizations
from .errors import BasisError, ZeroNormState
from .kinematics import PhotonTriple

__all__ = [
    "PAULI",
    "SPIN1",
    "QUBIT_2D",
    "SPIN1_3D",
    "MERMIN_CLASSICAL_BOUND",
    "SVETLICHNY_CLASSICAL_BOUND",
    "AnalyzerSetting",
    "deformed_singlet",
    "deformed_linear_pair",
    "para_state",
    "deformed_correlation_closed",
    "two_qubit_correlation",
    "qubit_correlation",
    "spin1_matrix",
    "spin1_eigen",
    "embed_3d",
    "correlation_3d",
    "correlation_2d",
    "projected_local_basis",
    "correlation_tensor",
    "mermin_value",
    "svetlichny_value",
]

QUBIT_2D = "QUBIT_2D"
SPIN1_3D = "SPIN1_3D"
FORMALISMS = (QUBIT_2D, SPIN1_3D)

MERMIN_CLASSICAL_BOUND = 2.0
SVETLICHNY_CLASSICAL_BOUND = 4.0

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_i, _j, _k] = 1.0
    _LEVI_CIVITA[_i, _k, _j] = -1.0

# generators of the adjoint representation, SPIN1[i][j, k] = -i eps_ijk
SPIN1 = -1j * _LEVI_CIVITA

_UNIT_TOL = 1e-12


def _unit(v, name="axis"):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} is not a unit vector (norm {np.linalg.norm(v)!r})")
    return v


def _check_orthonormal(u):
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise BasisError("a local basis is two complex 2-vectors (a 2x2 matrix)")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > _UNIT_TOL:
        raise BasisError("local basis vectors are not orthonormal")
    return u


@dataclass(frozen=True, eq=False)
class AnalyzerSetting:
    """Analyzer axes, one per party, with the formalism they act in.

    ``local_bases`` (qubit formalism only) holds one 2x2 matrix per party
    whose columns are the Jones vectors of that photon's basis kets 0 and 1.
    ``None`` means the state's own basis is used as the computational one.
    """

    axes: np.ndarray
    formalism: str = QUBIT_2D
    local_bases: tuple | None = None

    def __post_init__(self):
        if self.formalism not in FORMALISMS:
            raise ValueError(f"formalism must be one of {FORMALISMS}")
        axes = np.array([_unit(a) for a in self.axes])
        axes.flags.writeable = False
        object.__setattr__(self, "axes", axes)
        if self.local_bases is not None:
            if self.formalism != QUBIT_2D:
                raise BasisError("local bases only apply to the qubit formalism")
            bases = tuple(_check_orthonormal(u) for u in self.local_bases)
            if len(bases) != len(axes):
                raise BasisError("need one local basis per party")
            object.__setattr__(self, "local_bases", bases)

    def __eq__(self, other):
        if not isinstance(other, AnalyzerSetting):
            return NotImplemented
        if self.formalism != other.formalism or not np.array_equal(self.axes, other.axes):
            return False
        if self.local_bases is None or other.local_bases is None:
            return self.local_bases is other.local_bases
        return all(np.array_equal(u, v) for u, v in zip(self.local_bases, other.local_bases))

    __hash__ = None

    def to_json(self) -> dict:
        out = {"formalism": self.formalism, "axes": self.axes.tolist()}
        if self.local_bases is not None:
            out["local_bases"] = [
                [[[z.real, z.imag] for z in row] for row in u] for u in self.local_bases
            ]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "AnalyzerSetting":
        bases = obj.get("local_bases")
        if bases is not None:
            bases = tuple(
                np.array([[complex(re, im) for re, im in row] for row in u]) for u in bases
            )
        return cls(np.array(obj["axes"], dtype=float), obj.get("formalism", QUBIT_2D), bases)


# two-party states are 2x2 arrays, index 0 = up / + / H

def deformed_singlet(alpha: float) -> np.ndarray:
    """``(|up,down> - e^{i alpha} |down,up>) / sqrt(2)``."""
    psi = np.zeros((2, 2), dtype=complex)
    psi[0, 1] = 1.0
    psi[1, 0] = -np.exp(1j * alpha)
    return psi / math.sqrt(2.0)


def deformed_linear_pair(alpha: float) -> np.ndarray:
    """``(|H>|V> + e^{i alpha} |V>|H>) / sqrt(2)``, with H = index 0."""
    return deformed_singlet(alpha + math.pi)


def para_state() -> np.ndarray:
    """Two-photon helicity state ``(|++> - |-->) / sqrt(2)``."""
    psi = np.zeros((2, 2), dtype=complex)
    psi[0, 0] = 1.0
    psi[1, 1] = -1.0
    return psi / math.sqrt(2.0)


def deformed_correlation_closed(alpha: float, a, b) -> float:
    """Closed form of ``<a.S1 b.S2>`` in the deformed singlet."""
    a, b = _unit(a, "a"), _unit(b, "b")
    ca = math.cos(alpha)
    cross_z = a[0] * b[1] - a[1] * b[0]
    return -0.25 * (ca * float(a @ b) + a[2] * b[2] * (1.0 - ca) - cross_z * math.sin(alpha))


def _pauli_dot(axis):
    return np.tensordot(axis, PAULI, axes=1)


def two_qubit_correlation(state, a, b) -> float:
    """``<psi| (a.S) x (b.S) |psi>`` with ``S = sigma / 2``, by explicit matrices."""
    psi = np.asarray(state, dtype=complex).reshape(4)
    nrm = np.linalg.norm(psi)
    if nrm < 1e-12:
        raise ZeroNormState("two-qubit state has zero norm")
    psi = psi / nrm
    op = np.kron(_pauli_dot(_unit(a, "a")) / 2, _pauli_dot(_unit(b, "b")) / 2)
    return float(np.vdot(psi, op @ psi).real)


def qubit_correlation(amps, axes, local_bases=None) -> float:
    """``<psi| (x) (a_i . sigma) |psi>`` for an n-qubit amplitude array.

    Bare Pauli matrices, state normalized internally.  ``local_bases`` maps
    each qubit into its Jones representation before measuring.
    """
    psi = np.asarray(amps, dtype=complex)
    n = psi.ndim
    if len(axes) != n:
        raise ValueError(f"{n}-qubit state needs {n} axes")
    nrm = np.linalg.norm(psi)
    if nrm < 1e-12:
        raise ZeroNormState("state has zero norm")
    psi = psi / nrm
    if local_bases is not None:
        for k, u in enumerate(local_bases):
            psi = np.moveaxis(np.tensordot(_check_orthonormal(u), psi, axes=([1], [k])), 0, k)
    phi = psi
    for k, axis in enumerate(axes):
        op = _pauli_dot(_unit(axis))
        phi = np.moveaxis(np.tensordot(op, phi, axes=([1], [k])), 0, k)
    return float(np.vdot(psi, phi).real)


def correlation_2d(s: StateTensor, setting: AnalyzerSetting) -> float:
    """Three-party qubit correlator ``<(a.sigma)(b.sigma)(c.sigma)>``."""
    if setting.formalism != QUBIT_2D:
        raise BasisError("correlation_2d needs a QUBIT_2D setting")
    if s.norm < 1e-12:
        raise ZeroNormState("state has zero norm")
    return qubit_correlation(s.amplitudes, setting.axes, setting.local_bases)


def projected_local_basis(t: PhotonTriple, photon: int, components=(0, 1)) -> np.ndarray:
    """Jones vectors of photon ``photon``'s helicity states in two lab components.

    The helicity vectors are truncated to the chosen Cartesian components.
    The result is orthonormal only when the photon moves along the dropped
    axis; otherwise ``AnalyzerSetting`` and ``correlation_2d`` reject it.
    """
    eps = polarizations(t)[photon - 1]
    return eps[:, list(components)].T


def spin1_matrix(axis) -> np.ndarray:
    """``axis . S`` in the adjoint representation (3x3 Hermitian)."""
    return np.tensordot(_unit(axis), SPIN1, axes=1)


def spin1_eigen(axis):
    """Eigenvalues ``(-1, 0, 1)`` and eigenvectors (columns) of ``axis . S``.

    Each eigenvector is rephased so its first nonzero component is real
    positive.
    """
    w, v = np.linalg.eigh(spin1_matrix(axis))
    for k in range(3):
        col = v[:, k]
        lead = col[np.argmax(np.abs(col) > 1e-12)]
        v[:, k] = col * (abs(lead) / lead)
    return np.round(w, 15) + 0.0, v


def embed_3d(s: StateTensor, t: PhotonTriple) -> np.ndarray:
    """Represent helicity kets by their polarization vectors: a 3x3x3 tensor."""
    if s.basis != "circular":
        raise BasisError("embed_3d needs a circular-basis state")
    if s.norm < 1e-12:
        raise ZeroNormState("state has zero norm")
    eps = polarizations(t)
    return np.einsum("ia,jb,kc,ijk->abc", eps[0], eps[1], eps[2], s.amplitudes)


def correlation_3d(psi, a, b, c) -> float:
    """``<psi| (a.S)(b.S)(c.S) |psi> / <psi|psi>`` on a 3x3x3 polarization tensor."""
    psi = np.asarray(psi, dtype=complex).reshape(3, 3, 3)
    nrm2 = np.vdot(psi, psi).real
    if nrm2 < 1e-24:
        raise ZeroNormState("polarization tensor has zero norm")
    A, B, C = spin1_matrix(a), spin1_matrix(b), spin1_matrix(c)
    phi = np.einsum("ai,bj,ck,ijk->abc", A, B, C, psi)
    return float(np.vdot(psi, phi).real / nrm2)


def correlation_tensor(state, formalism: str = QUBIT_2D, local_bases=None) -> np.ndarray:
    """Real tensor ``T_ijk = <G_i x G_j x G_k>`` of the normalized state.

    ``G`` are the Pauli matrices (``QUBIT_2D``, ``state`` a ``StateTensor`` or
    2x2x2 array) or the spin-1 generators (``SPIN1_3D``, ``state`` a 3x3x3
    polarization tensor).  Any three-party correlator of that formalism is
    the trilinear form ``T[a, b, c]``.
    """
    if formalism == QUBIT_2D:
        psi = np.asarray(state.amplitudes if isinstance(state, StateTensor) else state, dtype=complex)
        psi = psi.reshape(2, 2, 2)
        if local_bases is not None:
            u1, u2, u3 = (_check_orthonormal(u) for u in local_bases)
            psi = np.einsum("ai,bj,ck,ijk->abc", u1, u2, u3, psi)
        gens = PAULI
    elif formalism == SPIN1_3D:
        psi = np.asarray(state, dtype=complex).reshape(3, 3, 3)
        gens = SPIN1
    else:
        raise ValueError(f"formalism must be one of {FORMALISMS}")
    nrm2 = np.vdot(psi, psi).real
    if nrm2 < 1e-24:
        raise ZeroNormState("state has zero norm")
    t = np.einsum("abc,iad,jbe,kcf,def->ijk", psi.conj(), gens, gens, gens, psi, optimize=True)
    return t.real / nrm2


def mermin_value(correlator, settings) -> float:
    """``E(a,b,c') + E(a,b',c) + E(a',b,c) - E(a',b',c')``.

    ``settings[p] = (unprimed, primed)`` axes of party ``p``.
    """
    (a, a2), (b, b2), (c, c2) = settings
    return correlator(a, b, c2) + correlator(a, b2, c) + correlator(a2, b, c) - correlator(a2, b2, c2)


def svetlichny_value(correlator, settings) -> float:
    """Mermin value plus its primed/unprimed-swapped partner."""
    (a, a2), (b, b2), (c, c2) = settings
    swapped = ((a2, a), (b2, b), (c2, c))
    return mermin_value(correlator, settings) + mermin_value(correlator, swapped)
