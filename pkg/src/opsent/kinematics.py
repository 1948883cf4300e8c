"""Three-photon kinematics in the positronium rest frame.

Units are fixed by ``m = 2`` (electron mass 1), so each photon energy equals
its Dalitz fraction ``x_i = 2 k_i / m``.  The reference orientation places the
decay plane in the lab x-y plane with photon 1 along +x; an ``Orientation``
(ZYZ Euler angles) rotates that reference event into the lab.  The spin
quantization axis is always the lab z axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateKinematics, InvalidKinematics

__all__ = [
    "DalitzPoint",
    "Orientation",
    "PhotonTriple",
    "dalitz_sample",
    "build_event",
    "plane_normal",
    "polarization_vector",
    "f_factor",
    "direction_angles",
]

TOTAL_ENERGY = 2.0
# below these the direction formulas lose double precision
DEGENERATE_X = 1e-9
DEGENERATE_CROSS = 1e-12
POLE_SIN = 1e-12
_RANGE_SLACK = 1e-12

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DalitzPoint:
    """Energy fractions of photons 1 and 2; ``x3 = 2 - x1 - x2`` is derived."""

    x1: float
    x2: float

    def __post_init__(self):
        x1, x2 = float(self.x1), float(self.x2)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        for name, value in (("x1", x1), ("x2", x2), ("x3", self.x3)):
            if not math.isfinite(value):
                raise InvalidKinematics(f"{name} is not finite")
            if value < -_RANGE_SLACK or value > 1.0 + _RANGE_SLACK:
                raise InvalidKinematics(f"{name} out of range [0, 1]: {value!r}")

    @property
    def x3(self) -> float:
        return TOTAL_ENERGY - self.x1 - self.x2

    @property
    def x(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def is_interior(self, threshold: float = DEGENERATE_X) -> bool:
        return bool(np.all(self.x > threshold))

    def to_json(self) -> dict:
        return {"x1": self.x1, "x2": self.x2}

    @classmethod
    def from_json(cls, obj: dict) -> "DalitzPoint":
        return cls(obj["x1"], obj["x2"])


def _wrap(angle: float) -> float:
    a = math.fmod(float(angle), TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # fmod can land exactly on 2*pi after the shift
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class Orientation:
    """ZYZ Euler angles, ``R = Rz(alpha) @ Ry(beta) @ Rz(gamma)``.

    Angles are reduced on construction to ``alpha, gamma in [0, 2 pi)`` and
    ``beta in [0, pi]``; the reduction leaves the rotation matrix unchanged.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        alpha, beta, gamma = float(self.alpha), float(self.beta), float(self.gamma)
        if not all(map(math.isfinite, (alpha, beta, gamma))):
            raise InvalidKinematics("Euler angles must be finite")
        beta = _wrap(beta)
        if beta > math.pi:
            beta = TWO_PI - beta
            alpha += math.pi
            gamma += math.pi
        object.__setattr__(self, "alpha", _wrap(alpha))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", _wrap(gamma))

    @property
    def matrix(self) -> np.ndarray:
        return _rz(self.alpha) @ _ry(self.beta) @ _rz(self.gamma)

    @property
    def is_identity(self) -> bool:
        return np.allclose(self.matrix, np.eye(3), rtol=0, atol=1e-15)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}

    @classmethod
    def from_json(cls, obj: dict) -> "Orientation":
        return cls(obj["alpha"], obj["beta"], obj["gamma"])


def _rz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _ry(b):
    c, s = math.cos(b), math.sin(b)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def direction_angles(khat):
    """Return ``(theta, phi)`` of a unit vector.

    ``theta = arccos(k_z)`` with ``k_z`` clamped to [-1, 1]; ``phi`` from
    ``atan2`` reduced to [0, 2 pi), and set to 0 at the poles.
    """
    kx, ky, kz = (float(v) for v in khat)
    theta = math.acos(min(1.0, max(-1.0, kz)))
    if math.sin(theta) < POLE_SIN:
        return theta, 0.0
    return theta, _wrap(math.atan2(ky, kx))


@dataclass(frozen=True, eq=False)
class PhotonTriple:
    """Energies and lab-frame unit directions of the three photons."""

    dalitz: DalitzPoint
    orientation: Orientation
    energies: np.ndarray = field(repr=False)
    directions: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.array(self.energies, dtype=float)
        d = np.array(self.directions, dtype=float)
        if e.shape != (3,) or d.shape != (3, 3):
            raise InvalidKinematics("expected 3 energies and a 3x3 direction array")
        e.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "directions", d)
        angles = np.array([direction_angles(k) for k in d])
        angles.flags.writeable = False
        object.__setattr__(self, "_angles", angles)

    @property
    def theta(self) -> np.ndarray:
        return self._angles[:, 0]

    @property
    def phi(self) -> np.ndarray:
        return self._angles[:, 1]

    @property
    def momenta(self) -> np.ndarray:
        return self.energies[:, None] * self.directions

    def momentum_residual(self) -> float:
        return float(np.max(np.abs(self.momenta.sum(axis=0))))

    def energy_residual(self) -> float:
        return abs(float(self.energies.sum()) - TOTAL_ENERGY)

    def validate(self, tol: float = 1e-12) -> None:
        """Raise ``InvalidKinematics`` if a conservation or norm invariant fails."""
        if self.momentum_residual() >= tol:
            raise InvalidKinematics(
                f"momentum not conserved: residual {self.momentum_residual():.3e}"
            )
        if self.energy_residual() >= tol:
            raise InvalidKinematics(
                f"energy not conserved: residual {self.energy_residual():.3e}"
            )
        norms = np.linalg.norm(self.directions, axis=1)
        if np.max(np.abs(norms - 1.0)) >= tol:
            raise InvalidKinematics("photon direction is not a unit vector")

    def cosines(self) -> np.ndarray:
        """Matrix of pairwise ``k_i . k_j``."""
        return self.directions @ self.directions.T

    def permuted(self, order) -> "PhotonTriple":
        """Relabel photons; ``order[i]`` is the old index of new photon ``i``."""
        order = list(order)
        e = self.energies[order]
        return PhotonTriple(
            DalitzPoint(e[0], e[1]), self.orientation, e, self.directions[order]
        )

    def rotated(self, rotation) -> "PhotonTriple":
        """Apply an extra lab rotation; the orientation tag is left unchanged."""
        r = np.asarray(rotation, dtype=float)
        return PhotonTriple(
            self.dalitz, self.orientation, self.energies, self.directions @ r.T
        )

    def __eq__(self, other):
        if not isinstance(other, PhotonTriple):
            return NotImplemented
        return (
            self.dalitz == other.dalitz
            and self.orientation == other.orientation
            and np.array_equal(self.energies, other.energies)
            and np.array_equal(self.directions, other.directions)
        )

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "dalitz": self.dalitz.to_json(),
            "orientation": self.orientation.to_json(),
            "energies": self.energies.tolist(),
            "directions": self.directions.tolist(),
            "theta": self.theta.tolist(),
            "phi": self.phi.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PhotonTriple":
        # angles are derived data; they are recomputed rather than trusted
        return cls(
            DalitzPoint.from_json(obj["dalitz"]),
            Orientation.from_json(obj["orientation"]),
            np.array(obj["energies"], dtype=float),
            np.array(obj["directions"], dtype=float),
        )


def dalitz_sample(u1: float, u2: float) -> DalitzPoint:
    """Map the unit square uniformly onto the allowed Dalitz triangle.

    Points with ``u1 + u2 >= 1`` are kept; the rest are folded by the point
    reflection ``(u1, u2) -> (1 - u1, 1 - u2)``, which maps the lower
    triangle onto the upper one with unit Jacobian.  The map is therefore
    two-to-one and uniform, and uses no rejection.
    """
    u1, u2 = float(u1), float(u2)
    if not (0.0 <= u1 <= 1.0 and 0.0 <= u2 <= 1.0):
        raise InvalidKinematics("u1 and u2 must lie in [0, 1]")
    if u1 + u2 < 1.0:
        u1, u2 = 1.0 - u1, 1.0 - u2
    return DalitzPoint(u1, u2)


def _opening_cosine(xi, xj, xl):
    c = (xl * xl - xi * xi - xj * xj) / (2.0 * xi * xj)
    return min(1.0, max(-1.0, c))


def build_event(d: DalitzPoint, o: Orientation | None = None) -> PhotonTriple:
    """Build the photon triple for a Dalitz point and an orientation.

    Raises
    ------
    DegenerateKinematics
        If any energy fraction is below ``DEGENERATE_X``.
    """
    if o is None:
        o = Orientation()
    x = d.x
    if np.any(x < DEGENERATE_X):
        raise DegenerateKinematics(
            f"photon energy below {DEGENERATE_X:g}: x = {tuple(x.tolist())}"
        )
    x1, x2, x3 = x
    c12 = _opening_cosine(x1, x2, x3)
    s12 = math.sqrt(max(0.0, 1.0 - c12 * c12))
    k1 = np.array([1.0, 0.0, 0.0])
    k2 = np.array([c12, s12, 0.0])
    p3 = -(x1 * k1 + x2 * k2)
    k3 = p3 / np.linalg.norm(p3)
    ref = np.array([k1, k2, k3])
    return PhotonTriple(d, o, x, ref @ o.matrix.T)


def plane_normal(t: PhotonTriple) -> np.ndarray:
    """Unit normal ``k1 x k2 / |k1 x k2|`` of the decay plane."""
    n = np.cross(t.directions[0], t.directions[1])
    size = np.linalg.norm(n)
    if size < DEGENERATE_CROSS:
        raise DegenerateKinematics(
            f"photons 1 and 2 are collinear (|k1 x k2| = {size:.3e}); plane undefined"
        )
    return n / size


def polarization_vector(theta: float, phi: float, helicity: int) -> np.ndarray:
    """Circular polarization vector for direction ``(theta, phi)``.

    Returns the complex 3-vector::

        -lam/sqrt(2) * (cos(theta) cos(phi) - i lam sin(phi),
                        cos(theta) sin(phi) + i lam cos(phi),
                        -sin(theta))

    It is transverse to the momentum, has unit norm, and satisfies
    ``eps(k, -1) == -conj(eps(k, +1))``.
    """
    if helicity not in (1, -1):
        raise ValueError(f"helicity must be +1 or -1, got {helicity!r}")
    lam = helicity
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    return (-lam / math.sqrt(2.0)) * np.array(
        [ct * cp - 1j * lam * sp, ct * sp + 1j * lam * cp, -st + 0j]
    )


def f_factor(t: PhotonTriple, i: int, j: int) -> float:
    """``1 - k_i . k_j`` for photons ``i, j`` (1-based)."""
    if i == j or not (1 <= i <= 3 and 1 <= j <= 3):
        raise IndexError(f"need two distinct photon indices in 1..3, got ({i}, {j})")
    a, b = sorted((i, j))
    return 1.0 - float(t.directions[a - 1] @ t.directions[b - 1])
