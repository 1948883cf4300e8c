"""Dalitz-plot scans, the hyperdeterminant-zero search, Bell-setting
optimization and Monte Carlo event generation."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .amplitude import StateTensor, decay_weight, state_tensor, superposed_state
from .correlations import (
    QUBIT_2D,
    SPIN1_3D,
    AnalyzerSetting,
    correlation_2d,
    correlation_3d,
    correlation_tensor,
    embed_3d,
)
from .entanglement import Tolerances, classify, hyperdeterminant
from .errors import DegenerateKinematics, EnvelopeExceeded, NoConvergence, ZeroNormState
from .kinematics import DalitzPoint, Orientation, PhotonTriple, build_event, dalitz_sample

__all__ = [
    "OBSERVABLES",
    "SCAN_COLUMNS",
    "ScanSpec",
    "ScanResult",
    "SearchEntry",
    "SearchResult",
    "SettingsResult",
    "Event",
    "SampleResult",
    "dalitz_grid",
    "scan_dalitz",
    "find_hdet_zeros",
    "optimize_settings",
    "sample_events",
    "random_orientation",
]

OBSERVABLES = ("tangle", "hdet", "class", "weight", "correlator")
POLICIES = ("plane-normal", "fixed-z")
SCAN_COLUMNS = (
    "x1", "x2", "theta1", "theta2", "theta3", "phi1", "phi2", "phi3",
    "s_z", "observable", "value", "class", "norm",
)
_EDGE = 1e-12


def _run(fn, items, threads):
    # executor.map keeps input order, so merging is by index
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _state(t, s_z):
    if isinstance(s_z, int):
        return state_tensor(t, s_z)
    return superposed_state(t, s_z)


def _sz_label(s_z):
    if isinstance(s_z, int):
        return str(s_z)
    return ";".join(f"{k}:{complex(v)!r}" for k, v in sorted(dict(s_z).items()))


@dataclass(frozen=True)
class ScanSpec:
    """Grid scan request.

    ``n`` grid points per Dalitz axis over [0, 1]; ``s_z`` is a spin
    projection or a ``{s_z: weight}`` superposition.  ``settings`` is needed
    only for the ``correlator`` observable.
    """

    n: int
    s_z: object = 0
    orientation: Orientation = field(default_factory=Orientation)
    observable: str = "tangle"
    settings: AnalyzerSetting | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("grid resolution n must be an integer >= 2")
        if self.observable not in OBSERVABLES:
            raise ValueError(f"observable must be one of {OBSERVABLES}")
        if self.observable == "correlator" and self.settings is None:
            raise ValueError("the correlator observable needs analyzer settings")


@dataclass
class ScanResult:
    rows: list
    skipped: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SCAN_COLUMNS)
        for row in self.rows:
            writer.writerow([_fmt(row[c]) for c in SCAN_COLUMNS])
        return buf.getvalue()


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def dalitz_grid(n: int, interior: bool = True):
    """Grid points of the Dalitz triangle, row-major in ``(x1, x2)``.

    With ``interior`` the triangle edges ``x1 = 1``, ``x2 = 1`` and
    ``x1 + x2 = 1`` are excluded; otherwise they are kept.
    """
    axis = np.linspace(0.0, 1.0, n)
    points = []
    for i, x1 in enumerate(axis):
        for j, x2 in enumerate(axis):
            s = x1 + x2
            if interior:
                if x1 < 1.0 - _EDGE and x2 < 1.0 - _EDGE and s > 1.0 + _EDGE:
                    points.append(((i, j), x1, x2))
            elif s >= 1.0 - _EDGE:
                points.append(((i, j), x1, x2))
    return points


def _observable(spec, t, state, report):
    obs = spec.observable
    if obs in ("tangle", "class"):
        return report.three_tangle
    if obs == "hdet":
        return abs(report.hyperdeterminant)
    if obs == "weight":
        return decay_weight(t)
    setting = spec.settings
    if setting.formalism == SPIN1_3D:
        return correlation_3d(embed_3d(state, t), *setting.axes)
    return correlation_2d(state, setting)


def scan_dalitz(spec: ScanSpec, threads: int = 1) -> ScanResult:
    """Evaluate an observable on every interior grid point of the Dalitz triangle.

    Degenerate points are skipped and counted, never raised.
    """
    points = dalitz_grid(spec.n)

    def work(item):
        _, x1, x2 = item
        try:
            t = build_event(DalitzPoint(x1, x2), spec.orientation)
            state = _state(t, spec.s_z)
        except (DegenerateKinematics, ZeroNormState):
            return None
        report = classify(state, spec.tolerances)
        return {
            "x1": x1,
            "x2": x2,
            **{f"theta{i + 1}": float(v) for i, v in enumerate(t.theta)},
            **{f"phi{i + 1}": float(v) for i, v in enumerate(t.phi)},
            "s_z": _sz_label(spec.s_z),
            "observable": spec.observable,
            "value": float(_observable(spec, t, state, report)),
            "class": report.class_label,
            "norm": state.norm,
        }

    results = _run(work, points, threads)
    rows = [r for r in results if r is not None]
    return ScanResult(rows, len(results) - len(rows))


# --- hyperdeterminant zero search -------------------------------------------


def _project_dalitz(x1, x2, margin):
    """Retract ``(x1, x2)`` onto the closed triangle shrunk by ``margin``."""
    p = np.clip([x1, x2], 0.0, 1.0)
    lo, hi = 1.0, 2.0 - margin
    s = p[0] + p[1]
    if s < lo:
        p = p + (lo - s) / 2.0
    elif s > hi:
        p = p - (s - hi) / 2.0
    return float(p[0]), float(p[1])


@dataclass
class SearchEntry:
    dalitz: DalitzPoint
    orientation: Orientation
    objective: float
    seed_objective: float
    report: object
    converged: bool
    iterations: int
    finding: str

    def to_json(self) -> dict:
        return {
            "dalitz": self.dalitz.to_json(),
            "orientation": self.orientation.to_json(),
            "objective": self.objective,
            "seed_objective": self.seed_objective,
            "report": self.report.to_json(),
            "converged": self.converged,
            "iterations": self.iterations,
            "finding": self.finding,
        }


@dataclass
class SearchResult:
    entries: list
    policy: str
    s_z: object
    tol: float
    grid_points: int
    skipped: int

    @property
    def zeros(self):
        return [e for e in self.entries if e.objective < self.tol]

    @property
    def w_class(self):
        return [e for e in self.zeros if e.finding == "w_class"]

    @property
    def best(self):
        if not self.entries:
            return None
        return min(self.entries, key=lambda e: (e.objective, e.dalitz.x1, e.dalitz.x2))

    def to_json(self) -> dict:
        return {
            "policy": self.policy,
            "s_z": _sz_label(self.s_z),
            "tol": self.tol,
            "grid_points": self.grid_points,
            "skipped": self.skipped,
            "entries": [e.to_json() for e in self.entries],
        }


def _local_minima(values, n):
    """Indices whose value is <= every present 8-neighbour."""
    minima = []
    for (i, j), v in values.items():
        neighbours = (
            values.get((i + di, j + dj))
            for di in (-1, 0, 1)
            for dj in (-1, 0, 1)
            if (di, dj) != (0, 0)
        )
        if all(w is None or v <= w for w in neighbours):
            minima.append(((i, j), v))
    return minima


def find_hdet_zeros(
    s_z=0,
    policy: str = "plane-normal",
    tol: float = 1e-9,
    *,
    n: int = 51,
    trigger: float = 5e-2,
    n_angles: int = 4,
    max_iter: int = 500,
    xatol: float = 1e-10,
    rank_tol: float = 1e-9,
    margin: float = 1e-6,
    threads: int = 1,
) -> SearchResult:
    """Search the phase space for zeros of the hyperdeterminant.

    ``plane-normal`` quantizes the spin along the decay-plane normal (the
    event stays in its reference orientation) and searches ``(x1, x2)``.
    ``fixed-z`` keeps the lab z axis and also searches the Euler angles
    ``(beta, gamma)``; ``alpha`` is gauge-fixed to 0 because a rotation about
    z only rephases the amplitudes.

    A coarse grid of ``|Hdet|`` over the closed triangle seeds a Nelder-Mead
    refinement from every grid local minimum below ``trigger``.  An isolated
    zero can sit between nodes with ``|Hdet|`` of order 1e-2 at the nearest
    one on a 51-point grid, hence the loose default.  Each refined point is
    re-classified with a tangle tolerance of ``4 * tol``; points with
    ``|Hdet| < tol`` are the zeros, labelled ``factorizing`` or ``w_class``.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    if not tol > 0 or not trigger > 0:
        raise ValueError("tolerances must be strictly positive")
    tolerances = Tolerances(rank=rank_tol, tangle=4.0 * tol)

    if policy == "plane-normal":
        slices = [Orientation()]
    else:
        betas = np.linspace(0.0, math.pi, n_angles + 1)[:-1] + math.pi / (2 * n_angles)
        gammas = np.linspace(0.0, 2 * math.pi, n_angles, endpoint=False)
        slices = [Orientation(0.0, b, g) for b in betas for g in gammas]

    def evaluate(params):
        x1, x2 = _project_dalitz(params[0], params[1], margin)
        penalty = math.hypot(params[0] - x1, params[1] - x2)
        o = Orientation(0.0, params[2], params[3]) if len(params) > 2 else Orientation()
        t = build_event(DalitzPoint(x1, x2), o)
        state = _state(t, s_z)
        return t, state, penalty

    def objective(params):
        try:
            _, state, penalty = evaluate(params)
        except (DegenerateKinematics, ZeroNormState):
            return math.inf
        return abs(hyperdeterminant(state)) + penalty

    # the closed triangle: collinear edge configurations are physical
    grid = dalitz_grid(n, interior=False)
    seeds = []
    skipped = 0
    for o in slices:
        values = {}
        for idx, x1, x2 in grid:
            params = _params(x1, x2, o, policy)
            v = objective(params)
            if math.isfinite(v):
                values[idx] = v
            else:
                skipped += 1
        for idx, v in _local_minima(values, n):
            if v < trigger:
                x1, x2 = _grid_value(idx, n)
                seeds.append((_params(x1, x2, o, policy), v))

    step = 0.5 / (n - 1)
    angle_step = math.pi / (2 * n_angles)

    def refine(seed):
        start, v0 = seed
        steps = [step, step] + [angle_step] * (len(start) - 2)
        simplex = np.array([start] + [start + s * e for s, e in zip(steps, np.eye(len(start)))])
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxiter": max_iter,
                "xatol": xatol,
                "fatol": math.inf,
            },
        )
        x = res.x if res.fun <= v0 else start
        t, state, _ = evaluate(x)
        report = classify(state, tolerances)
        value = abs(report.hyperdeterminant)
        if report.label in ("PRODUCT", "BISEPARABLE"):
            finding = "factorizing"
        elif report.label == "W_CLASS":
            finding = "w_class"
        else:
            finding = "ghz_class"
        return SearchEntry(
            t.dalitz, t.orientation, value, v0, report,
            bool(res.status == 0), int(res.nit), finding,
        )

    entries = _run(refine, seeds, threads)
    return SearchResult(entries, policy, s_z, tol, len(grid) * len(slices), skipped)


def _grid_value(idx, n):
    axis = np.linspace(0.0, 1.0, n)
    return float(axis[idx[0]]), float(axis[idx[1]])


def _params(x1, x2, o, policy):
    if policy == "plane-normal":
        return np.array([x1, x2])
    return np.array([x1, x2, o.beta, o.gamma])


# --- Bell-setting optimization ----------------------------------------------


@dataclass
class SettingsResult:
    """Best analyzer settings; ``settings[p] = (unprimed, primed)`` axes."""

    value: float
    settings: np.ndarray
    objective: str
    formalism: str
    restart_values: list
    converged: list
    seed: int

    def to_json(self) -> dict:
        return {
            "objective": self.objective,
            "formalism": self.formalism,
            "value": self.value,
            "settings": self.settings.tolist(),
            "restart_values": self.restart_values,
            "converged": self.converged,
            "seed": self.seed,
        }


# sign masks over E[p, q, r] with 0 = unprimed and 1 = primed axis
_MERMIN_MASK = np.zeros((2, 2, 2))
_MERMIN_MASK[0, 0, 1] = _MERMIN_MASK[0, 1, 0] = _MERMIN_MASK[1, 0, 0] = 1.0
_MERMIN_MASK[1, 1, 1] = -1.0
_SVETLICHNY_MASK = _MERMIN_MASK + _MERMIN_MASK[::-1, ::-1, ::-1]


def _mask(objective):
    if objective == "mermin":
        return _MERMIN_MASK
    if objective == "svetlichny":
        return _SVETLICHNY_MASK
    raise ValueError("objective must be 'mermin' or 'svetlichny'")


def _all_correlators(T9, axes):
    """``E[p, q, r]`` for all primed/unprimed choices; ``T9`` is T reshaped (3, 9)."""
    A, B, C = axes[0:2], axes[2:4], axes[4:6]
    return B @ ((A @ T9).reshape(2, 3, 3) @ C.T)


def _axes_from_angles(params):
    theta, phi = params[:6], params[6:]
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=1)


def _angles_from_axes(axes):
    axes = axes / np.linalg.norm(axes, axis=1)[:, None]
    return np.concatenate(
        [np.arccos(np.clip(axes[:, 2], -1.0, 1.0)), np.arctan2(axes[:, 1], axes[:, 0])]
    )


def optimize_settings(
    state,
    objective: str = "mermin",
    formalism: str = QUBIT_2D,
    restarts: int = 20,
    seed: int = 0,
    *,
    local_bases=None,
    max_iter: int = 4000,
    xatol: float = 1e-9,
    fatol: float = 1e-13,
) -> SettingsResult:
    """Maximize a Mermin or Svetlichny value over analyzer settings.

    ``state`` is a ``StateTensor`` (or 2x2x2 array) for ``QUBIT_2D`` and a
    3x3x3 polarization tensor for ``SPIN1_3D``.  Each restart draws six
    random unit vectors from its own child of ``SeedSequence(seed)`` and runs
    Nelder-Mead over their polar and azimuthal angles, so every trial axis is
    a unit vector.  The best restart wins, so adding restarts never lowers
    the result.
    """
    mask = _mask(objective)
    if restarts < 1:
        raise ValueError("need at least one restart")
    T9 = correlation_tensor(state, formalism, local_bases).reshape(3, 9)

    def negative(params):
        return -float(np.sum(mask * _all_correlators(T9, _axes_from_angles(params))))

    children = np.random.SeedSequence(seed).spawn(restarts)
    values, converged, best = [], [], None
    for child in children:
        start = np.random.default_rng(child).normal(size=(6, 3))
        res = minimize(
            negative,
            _angles_from_axes(start),
            method="Nelder-Mead",
            options={"maxiter": max_iter, "xatol": xatol, "fatol": fatol},
        )
        value = -float(res.fun)
        values.append(value)
        converged.append(bool(res.status == 0))
        if best is None or value > best[0]:
            best = (value, _axes_from_angles(res.x))
    if not any(converged):
        raise NoConvergence(f"all {restarts} restarts hit the {max_iter}-iteration budget")
    return SettingsResult(
        best[0], best[1].reshape(3, 2, 3), objective, formalism, values, converged, seed
    )


# --- event generation -------------------------------------------------------


def random_orientation(rng) -> Orientation:
    """Haar-uniform rotation as ZYZ Euler angles."""
    return Orientation(
        rng.uniform(0.0, 2 * math.pi),
        math.acos(rng.uniform(-1.0, 1.0)),
        rng.uniform(0.0, 2 * math.pi),
    )


@dataclass(frozen=True, eq=False)
class Event:
    triple: PhotonTriple
    state: StateTensor
    weight: float

    def to_json(self) -> dict:
        return {"event": self.triple.to_json(), "state": self.state.to_json(), "weight": self.weight}

    @classmethod
    def from_json(cls, obj: dict) -> "Event":
        return cls(
            PhotonTriple.from_json(obj["event"]),
            StateTensor.from_json(obj["state"]),
            obj["weight"],
        )

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return (self.triple, self.state, self.weight) == (other.triple, other.state, other.weight)

    __hash__ = None


@dataclass
class SampleResult:
    events: list
    trials: int
    envelope: float | None
    weighting: str

    @property
    def acceptance_rate(self) -> float:
        return len(self.events) / self.trials if self.trials else 0.0


def sample_events(
    n: int,
    weighting: str = "uniform",
    seed: int = 0,
    *,
    s_z=0,
    envelope_points: int = 10_000,
    safety: float = 1.2,
) -> SampleResult:
    """Generate ``n`` decay events with isotropic orientation.

    ``uniform`` draws flat phase space.  ``matrix-element`` rejection-samples
    against ``safety * max(weight)`` over a preliminary scan of
    ``envelope_points`` random Dalitz points; any weight above that envelope
    raises ``EnvelopeExceeded``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if weighting not in ("uniform", "matrix-element"):
        raise ValueError("weighting must be 'uniform' or 'matrix-element'")
    scan_seq, main_seq = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(main_seq)

    envelope = None
    if weighting == "matrix-element":
        scan_rng = np.random.default_rng(scan_seq)
        wmax = 0.0
        for u1, u2 in scan_rng.uniform(size=(envelope_points, 2)):
            try:
                wmax = max(wmax, decay_weight(build_event(dalitz_sample(u1, u2))))
            except DegenerateKinematics:
                continue
        envelope = safety * wmax

    events, trials = [], 0
    while len(events) < n:
        u1, u2 = rng.uniform(size=2)
        o = random_orientation(rng)
        accept_u = rng.uniform()
        trials += 1
        try:
            t = build_event(dalitz_sample(u1, u2), o)
            state = _state(t, s_z)
        except (DegenerateKinematics, ZeroNormState):
            continue
        w = decay_weight(t)
        if envelope is not None:
            if w > envelope:
                raise EnvelopeExceeded(
                    f"weight {w:.6g} exceeds envelope {envelope:.6g} at "
                    f"x = ({t.dalitz.x1:.6g}, {t.dalitz.x2:.6g})",
                    weight=w, envelope=envelope, point=t.dalitz,
                )
            if accept_u * envelope > w:
                continue
        events.append(Event(t, state, w))
    return SampleResult(events, trials, envelope, weighting)
