"""Basis changes, Cayley hyperdeterminant, Schmidt ranks and state classes."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .amplitude import StateTensor, ZERO_NORM
from .errors import BasisError, ZeroNormState

__all__ = [
    "CIRCULAR_TO_LINEAR",
    "Tolerances",
    "EntanglementReport",
    "CUTS",
    "to_linear_basis",
    "to_circular_basis",
    "hyperdeterminant",
    "three_tangle",
    "s_z0_state",
    "s_z0_hdet_product",
    "HDET_PRODUCT_FACTOR",
    "bipartition_schmidt",
    "classify",
    "ghz_state",
    "w_state",
    "product_state",
]

# columns are |+> = (|0> + i|1>)/sqrt2 and |-> = (|0> - i|1>)/sqrt2
CIRCULAR_TO_LINEAR = np.array([[1.0, 1.0], [1j, -1j]]) / math.sqrt(2.0)

# hyperdeterminant of the normalized linear-basis S_z=0 state divided by the
# printed four-factor product; fixed by the Cayley evaluation in the tests
HDET_PRODUCT_FACTOR = -1.0

CUTS = ("1|23", "2|13", "3|12")

PRODUCT = "PRODUCT"
BISEPARABLE = "BISEPARABLE"
W_CLASS = "W_CLASS"
GHZ_CLASS = "GHZ_CLASS"


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-9
    tangle: float = 1e-10

    def __post_init__(self):
        if not (self.rank > 0 and self.tangle > 0):
            raise ValueError("tolerances must be strictly positive")


def _local(amps, u):
    return np.einsum("ai,bj,ck,ijk->abc", u, u, u, amps)


def to_linear_basis(s: StateTensor) -> StateTensor:
    if s.basis != "circular":
        raise BasisError(f"expected a circular-basis state, got {s.basis!r}")
    return StateTensor(_local(s.amplitudes, CIRCULAR_TO_LINEAR), "linear")


def to_circular_basis(s: StateTensor) -> StateTensor:
    if s.basis != "linear":
        raise BasisError(f"expected a linear-basis state, got {s.basis!r}")
    return StateTensor(_local(s.amplitudes, CIRCULAR_TO_LINEAR.conj().T), "circular")


def _normalized_amplitudes(s: StateTensor) -> np.ndarray:
    if s.norm < ZERO_NORM:
        raise ZeroNormState(f"state norm {s.norm:.3e} below {ZERO_NORM:g}")
    return s.amplitudes / s.norm


def cayley(c) -> complex:
    """Cayley hyperdeterminant of a raw 2x2x2 array (no normalization)."""
    c000, c001, c010, c011 = c[0, 0, 0], c[0, 0, 1], c[0, 1, 0], c[0, 1, 1]
    c100, c101, c110, c111 = c[1, 0, 0], c[1, 0, 1], c[1, 1, 0], c[1, 1, 1]
    squares = (
        c000**2 * c111**2
        + c001**2 * c110**2
        + c010**2 * c101**2
        + c100**2 * c011**2
    )
    pairs = (
        c000 * c111 * c011 * c100
        + c000 * c111 * c101 * c010
        + c000 * c111 * c110 * c001
        + c011 * c100 * c101 * c010
        + c011 * c100 * c110 * c001
        + c101 * c010 * c110 * c001
    )
    quads = c000 * c110 * c101 * c011 + c111 * c001 * c010 * c100
    return complex(squares - 2.0 * pairs + 4.0 * quads)


def hyperdeterminant(s: StateTensor) -> complex:
    """Cayley hyperdeterminant of the normalized amplitudes.

    Its modulus is invariant under local unitaries and bounded by 1/4,
    attained by the GHZ state.
    """
    return cayley(_normalized_amplitudes(s))


def three_tangle(s: StateTensor) -> float:
    return 4.0 * abs(hyperdeterminant(s))


def s_z0_state(alpha: float, beta: float, gamma: float) -> StateTensor:
    """Circular-basis ``S_z = 0`` state from its three pair coefficients.

    ``gamma (|++-> - |--+>) + beta (|+-+> - |-+->) + alpha (|-++> - |+-->)``
    """
    amps = np.zeros((2, 2, 2), dtype=complex)
    amps[0, 0, 1], amps[1, 1, 0] = gamma, -gamma
    amps[0, 1, 0], amps[1, 0, 1] = beta, -beta
    amps[1, 0, 0], amps[0, 1, 1] = alpha, -alpha
    return StateTensor(amps, "circular")


def s_z0_hdet_product(alpha: float, beta: float, gamma: float) -> float:
    """Four-factor product form of the ``S_z = 0`` hyperdeterminant, as printed.

    For coefficients normalized to a unit-norm state,
    ``hyperdeterminant(to_linear_basis(s_z0_state(a, b, g)))`` equals
    ``HDET_PRODUCT_FACTOR * s_z0_hdet_product(a, b, g)``.
    """
    a, b, g = alpha, beta, gamma
    return (-a + b - g) * (a - b - g) * (-a - b + g) * (a + b + g)


def _cut_matrix(amps, cut):
    k = _cut_index(cut)
    return np.moveaxis(amps, k, 0).reshape(2, 4)


def _cut_index(cut):
    if isinstance(cut, int):
        if cut not in (1, 2, 3):
            raise ValueError(f"cut must be 1, 2 or 3, got {cut}")
        return cut - 1
    if cut not in CUTS:
        raise ValueError(f"cut must be one of {CUTS}, got {cut!r}")
    return CUTS.index(cut)


def bipartition_schmidt(s: StateTensor, cut) -> np.ndarray:
    """Descending Schmidt coefficients of the normalized state across ``cut``.

    ``cut`` is ``"1|23"``, ``"2|13"``, ``"3|12"`` or the isolated photon 1..3.
    """
    amps = _normalized_amplitudes(s)
    return np.linalg.svd(_cut_matrix(amps, cut), compute_uv=False)


@dataclass(frozen=True)
class EntanglementReport:
    hyperdeterminant: complex
    three_tangle: float
    schmidt: dict
    label: str
    cut: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    @property
    def class_label(self) -> str:
        if self.label == BISEPARABLE:
            return f"{BISEPARABLE}({self.cut})"
        return self.label

    def to_json(self) -> dict:
        h = self.hyperdeterminant
        return {
            "hyperdeterminant": [h.real, h.imag],
            "three_tangle": self.three_tangle,
            "schmidt": {k: list(v) for k, v in self.schmidt.items()},
            "label": self.label,
            "cut": self.cut,
            "class": self.class_label,
            "tolerances": asdict(self.tolerances),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EntanglementReport":
        re, im = obj["hyperdeterminant"]
        return cls(
            complex(re, im),
            obj["three_tangle"],
            {k: tuple(v) for k, v in obj["schmidt"].items()},
            obj["label"],
            obj["cut"],
            Tolerances(**obj["tolerances"]),
        )


def classify(s: StateTensor, tol: Tolerances | None = None) -> EntanglementReport:
    """Assign PRODUCT / BISEPARABLE(cut) / W_CLASS / GHZ_CLASS.

    A cut is rank one when its second Schmidt coefficient is below
    ``tol.rank``.  All cuts rank one gives PRODUCT (two already imply the
    third for pure states), one gives BISEPARABLE, none with tangle below
    ``tol.tangle`` gives W_CLASS, anything else GHZ_CLASS.
    """
    tol = tol or Tolerances()
    amps = _normalized_amplitudes(s)
    schmidt = {
        cut: tuple(float(v) for v in np.linalg.svd(_cut_matrix(amps, cut), compute_uv=False))
        for cut in CUTS
    }
    hdet = cayley(amps)
    tau = 4.0 * abs(hdet)
    rank_one = [cut for cut in CUTS if schmidt[cut][1] < tol.rank]
    cut = None
    if len(rank_one) >= 2:
        label = PRODUCT
    elif len(rank_one) == 1:
        label, cut = BISEPARABLE, rank_one[0]
    elif tau < tol.tangle:
        label = W_CLASS
    else:
        label = GHZ_CLASS
    return EntanglementReport(hdet, tau, schmidt, label, cut, tol)


def ghz_state(basis: str = "linear") -> StateTensor:
    amps = np.zeros((2, 2, 2), dtype=complex)
    amps[0, 0, 0] = amps[1, 1, 1] = 1 / math.sqrt(2.0)
    return StateTensor(amps, basis)


def w_state(basis: str = "linear") -> StateTensor:
    amps = np.zeros((2, 2, 2), dtype=complex)
    amps[0, 0, 1] = amps[0, 1, 0] = amps[1, 0, 0] = 1 / math.sqrt(3.0)
    return StateTensor(amps, basis)


def product_state(basis: str = "linear") -> StateTensor:
    amps = np.zeros((2, 2, 2), dtype=complex)
    amps[0, 0, 0] = 1.0
    return StateTensor(amps, basis)
