"""
Command-line interface.

Usage:
    opsent state --x1 0.6667 --x2 0.6667 --sz 0
    opsent classify --state ghz
    opsent scan --n 101 --sz 0 --observable tangle -o out.csv
    opsent search --policy plane-normal --sz 0
    opsent bell --state ghz --objective mermin
    opsent sample --n 1000 --weighting matrix-element --seed 7 -o events.jsonl

Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 numerical failure
(no convergence, sampling envelope exceeded).  Settings resolve as
flag > config file > default; ``OPSENT_THREADS`` overrides the configured
thread count when ``--threads`` is not given.
"""

from __future__ import annotations

import functools
import json
import math
import os
import sys
from dataclasses import dataclass, fields, replace

import click
import numpy as np

from .amplitude import StateTensor, closed_form_coefficients, state_tensor, superposed_state
from .correlations import (
    QUBIT_2D,
    SPIN1_3D,
    AnalyzerSetting,
    correlation_tensor,
    deformed_singlet,
    embed_3d,
    mermin_value,
    para_state,
    svetlichny_value,
    two_qubit_correlation,
)
from .entanglement import (
    Tolerances,
    classify,
    ghz_state,
    product_state,
    to_linear_basis,
    w_state,
)
from .errors import EnvelopeExceeded, NoConvergence, OpsentError
from .kinematics import DalitzPoint, Orientation, build_event
from .search import ScanSpec, find_hdet_zeros, optimize_settings, sample_events, scan_dalitz

__all__ = ["cli", "main", "RunConfig", "load_config"]

EXIT_IO, EXIT_INVALID, EXIT_NUMERICAL = 1, 2, 3
THREADS_ENV = "OPSENT_THREADS"


@dataclass(frozen=True)
class RunConfig:
    rank_tol: float = 1e-9
    tangle_tol: float = 1e-10
    hdet_tol: float = 1e-9
    trigger: float = 5e-2
    xatol: float = 1e-10
    format: str | None = None
    output: str | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("rank_tol", "tangle_tol", "hdet_tol", "trigger", "xatol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise click.BadParameter(f"tolerance {name} must be strictly positive")
        if self.threads < 1:
            raise click.BadParameter("threads must be >= 1")

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(rank=self.rank_tol, tangle=self.tangle_tol)


def load_config(path) -> RunConfig:
    """Read a JSON config; unknown keys are rejected."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise click.BadParameter("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise click.BadParameter(f"unknown config keys: {', '.join(unknown)}")
    return RunConfig(**data)


def _resolve(ctx_params, **flags) -> RunConfig:
    cfg = load_config(ctx_params["config"]) if ctx_params.get("config") else RunConfig()
    if flags.get("threads") is None and os.environ.get(THREADS_ENV):
        try:
            flags["threads"] = int(os.environ[THREADS_ENV])
        except ValueError:
            raise click.BadParameter(f"{THREADS_ENV} must be an integer")
    return replace(cfg, **{k: v for k, v in flags.items() if v is not None})


def _fail(code, message):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (NoConvergence, EnvelopeExceeded) as exc:
            _fail(EXIT_NUMERICAL, exc)
        except (OpsentError, ValueError, KeyError) as exc:
            _fail(EXIT_INVALID, exc)
        except OSError as exc:
            _fail(EXIT_IO, exc)

    return wrapper


def _emit(text, cfg):
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(cfg.output, "w") as fh:
            fh.write(text)


def _json(obj):
    return json.dumps(obj, indent=2)


def _sz(ctx, param, value):
    """``-1``, ``0``, ``1`` or superposition weights such as ``1:0.6,-1:0.8j``."""
    if value is None:
        return value
    try:
        if ":" not in value:
            s = int(value)
            if s not in (-1, 0, 1):
                raise ValueError
            return s
        weights = {}
        for term in value.split(","):
            k, w = term.split(":")
            k = int(k)
            if k not in (-1, 0, 1) or k in weights:
                raise ValueError
            weights[k] = complex(w.strip())
        return weights
    except ValueError:
        raise click.BadParameter("S_z must be -1, 0, +1 or weights like '1:0.6,-1:0.8j'")


def _decay_state(t, sz):
    if isinstance(sz, int):
        return state_tensor(t, sz)
    return superposed_state(t, sz)


def _sz_json(sz):
    if isinstance(sz, int):
        return sz
    return {str(k): [w.real, w.imag] for k, w in sorted(sz.items())}


def common_options(fn):
    fn = click.option("--config", type=click.Path(dir_okay=False), default=None,
                      help="JSON config file (flags override it).")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Master RNG seed.  [default: 0]")(fn)
    fn = click.option("--threads", type=int, default=None,
                      help=f"Worker threads; {THREADS_ENV} overrides the config.  [default: 1]")(fn)
    fn = click.option("-o", "--output", type=str, default=None,
                      help="Output path; '-' or omitted writes to stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json", "jsonl"]), default=None,
                      help="Output format (default depends on the command).")(fn)
    return fn


def kinematic_options(fn):
    fn = click.option("--x1", type=float, default=None,
                      help="Energy fraction of photon 1, 2k1/m in [0, 1].")(fn)
    fn = click.option("--x2", type=float, default=None,
                      help="Energy fraction of photon 2, 2k2/m in [0, 1].")(fn)
    fn = click.option("--alpha", type=float, default=0.0, show_default=True,
                      help="Euler angle alpha (radians, ZYZ).")(fn)
    fn = click.option("--beta", type=float, default=0.0, show_default=True,
                      help="Euler angle beta (radians, ZYZ).")(fn)
    fn = click.option("--gamma", type=float, default=0.0, show_default=True,
                      help="Euler angle gamma (radians, ZYZ).")(fn)
    fn = click.option("--sz", type=str, default="0", callback=_sz, show_default=True,
                      help="Spin projection on the lab z axis (-1, 0, +1) or weights like 1:0.6,-1:0.8j.")(fn)
    return fn


def _event(x1, x2, alpha, beta, gamma):
    if x1 is None or x2 is None:
        raise click.UsageError("--x1 and --x2 are both required for a decay state")
    return build_event(DalitzPoint(x1, x2), Orientation(alpha, beta, gamma))


NAMED_3 = {"ghz": ghz_state, "w": w_state, "product": product_state}


def _named_two_qubit(name):
    if name == "para":
        return para_state()
    if name.startswith("singlet"):
        arg = name[len("singlet"):].strip("():")
        return deformed_singlet(float(arg) if arg else 0.0)
    return None


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Three-photon polarization entanglement from ortho-positronium decay."""


@cli.command()
@kinematic_options
@common_options
@handle_errors
def state(x1, x2, alpha, beta, gamma, sz, config, seed, threads, output, fmt):
    """Decay state for one event, with the closed-form coefficient comparison."""
    cfg = _resolve(locals(), seed=seed, threads=threads, output=output, format=fmt)
    t = _event(x1, x2, alpha, beta, gamma)
    s = _decay_state(t, sz)
    out = {"event": t.to_json(), "s_z": _sz_json(sz), "state": s.to_json(), "norm": s.norm}
    if isinstance(sz, int):
        out["closed_form"] = closed_form_coefficients(t, sz).to_json()
    _emit(_json(out), cfg)


@cli.command("classify")
@click.option("--state", "name", type=click.Choice(sorted(NAMED_3)), default=None,
              help="Built-in three-qubit state instead of a decay state.")
@click.option("--state-file", type=click.Path(dir_okay=False), default=None,
              help="StateTensor JSON file to classify.")
@click.option("--basis", type=click.Choice(["circular", "linear"]), default="circular",
              show_default=True, help="Basis a decay state is reported in.")
@click.option("--rank-tol", type=float, default=None,
              help="Second Schmidt coefficient below this is rank one.  [default: 1e-9]")
@click.option("--tangle-tol", type=float, default=None,
              help="Three-tangle below this is W class.  [default: 1e-10]")
@kinematic_options
@common_options
@handle_errors
def classify_cmd(name, state_file, basis, rank_tol, tangle_tol,
                 x1, x2, alpha, beta, gamma, sz, config, seed, threads, output, fmt):
    """Entanglement report (hyperdeterminant, tangle, Schmidt, class)."""
    cfg = _resolve(locals(), seed=seed, threads=threads, output=output, format=fmt,
                   rank_tol=rank_tol, tangle_tol=tangle_tol)
    if name:
        s = NAMED_3[name]()
    elif state_file:
        with open(state_file) as fh:
            s = StateTensor.from_json(json.load(fh))
    else:
        s = _decay_state(_event(x1, x2, alpha, beta, gamma), sz)
        if basis == "linear":
            s = to_linear_basis(s)
    _emit(_json({"state": s.to_json(), "report": classify(s, cfg.tolerances).to_json()}), cfg)


@cli.command()
@click.option("--n", "n", type=int, required=True, help="Grid points per Dalitz axis (>= 2).")
@click.option("--observable", type=click.Choice(["tangle", "hdet", "class", "weight", "correlator"]),
              default="tangle", show_default=True, help="Quantity in the value column.")
@click.option("--settings", "settings_file", type=click.Path(dir_okay=False), default=None,
              help="AnalyzerSetting JSON for --observable correlator.")
@click.option("--sz", type=str, default="0", callback=_sz, show_default=True,
              help="Spin projection on the lab z axis (-1, 0, +1) or weights like 1:0.6,-1:0.8j.")
@click.option("--alpha", type=float, default=0.0, show_default=True, help="Euler angle alpha (radians).")
@click.option("--beta", type=float, default=0.0, show_default=True, help="Euler angle beta (radians).")
@click.option("--gamma", type=float, default=0.0, show_default=True, help="Euler angle gamma (radians).")
@click.option("--rank-tol", type=float, default=None, help="Rank-one threshold.  [default: 1e-9]")
@click.option("--tangle-tol", type=float, default=None, help="W-class tangle threshold.  [default: 1e-10]")
@common_options
@handle_errors
def scan(n, observable, settings_file, sz, alpha, beta, gamma, rank_tol, tangle_tol,
         config, seed, threads, output, fmt):
    """Observable on the interior of an n x n Dalitz grid (CSV by default)."""
    cfg = _resolve(locals(), seed=seed, threads=threads, output=output, format=fmt,
                   rank_tol=rank_tol, tangle_tol=tangle_tol)
    settings = None
    if settings_file:
        with open(settings_file) as fh:
            settings = AnalyzerSetting.from_json(json.load(fh))
    spec = ScanSpec(n, sz, Orientation(alpha, beta, gamma), observable, settings, cfg.tolerances)
    result = scan_dalitz(spec, threads=cfg.threads)
    if (cfg.format or "csv") == "csv":
        _emit(result.to_csv(), cfg)
    else:
        _emit(_json({"skipped": result.skipped, "rows": result.rows}), cfg)
    click.echo(f"{len(result.rows)} rows, {result.skipped} degenerate points skipped", err=True)


@cli.command()
@click.option("--policy", type=click.Choice(["plane-normal", "fixed-z"]), default="plane-normal",
              show_default=True, help="Spin quantization along the plane normal or the lab z axis.")
@click.option("--sz", type=str, default="0", callback=_sz, show_default=True,
              help="Spin projection (-1, 0, +1) or weights like 1:0.6,-1:0.8j.")
@click.option("--tol", type=float, default=None, help="|Hdet| below this is a zero.  [default: 1e-9]")
@click.option("--n", "n", type=int, default=51, show_default=True, help="Coarse grid points per axis.")
@click.option("--trigger", type=float, default=None,
              help="Refine grid minima with |Hdet| below this.  [default: 5e-2]")
@click.option("--n-angles", type=int, default=4, show_default=True,
              help="Euler-angle grid points per angle (fixed-z policy).")
@click.option("--max-iter", type=int, default=500, show_default=True, help="Nelder-Mead iteration budget.")
@common_options
@handle_errors
def search(policy, sz, tol, n, trigger, n_angles, max_iter, config, seed, threads, output, fmt):
    """Search phase space for hyperdeterminant zeros (W-class candidates)."""
    cfg = _resolve(locals(), seed=seed, threads=threads, output=output, format=fmt,
                   hdet_tol=tol, trigger=trigger)
    result = find_hdet_zeros(
        sz, policy, cfg.hdet_tol, n=n, trigger=cfg.trigger, n_angles=n_angles,
        max_iter=max_iter, xatol=cfg.xatol, rank_tol=cfg.rank_tol, threads=cfg.threads,
    )
    out = result.to_json()
    out["summary"] = {
        "refined": len(result.entries),
        "zeros": len(result.zeros),
        "factorizing": sum(e.finding == "factorizing" for e in result.zeros),
        "w_class": len(result.w_class),
    }
    _emit(_json(out), cfg)


def _axes_option(value):
    if value is None:
        return None
    axes = np.array(json.loads(value), dtype=float)
    return axes / np.linalg.norm(axes, axis=-1, keepdims=True)


@cli.command()
@click.option("--state", "name", type=str, default=None,
              help="ghz, w, product, para or singlet(ALPHA); omit to use --x1/--x2.")
@click.option("--objective", type=click.Choice(["mermin", "svetlichny"]), default="mermin",
              show_default=True, help="Correlator combination to maximize.")
@click.option("--formalism", type=click.Choice(["2d", "3d"]), default="2d", show_default=True,
              help="Qubit (Pauli) or spin-1 (3-vector) operators.")
@click.option("--restarts", type=int, default=20, show_default=True, help="Random Nelder-Mead restarts.")
@click.option("--axes", type=str, default=None,
              help="JSON axes to evaluate instead of optimizing: 6 vectors "
                   "[a, a', b, b', c, c'] for three parties, 2 vectors [a, b] for two.")
@kinematic_options
@common_options
@handle_errors
def bell(name, objective, formalism, restarts, axes, x1, x2, alpha, beta, gamma, sz,
         config, seed, threads, output, fmt):
    """Mermin / Svetlichny values, optimized or at fixed axes."""
    cfg = _resolve(locals(), seed=seed, threads=threads, output=output, format=fmt)
    axes = _axes_option(axes)
    two = _named_two_qubit(name) if name else None
    if two is not None:
        if axes is None or axes.shape != (2, 3):
            raise click.UsageError("two-photon states need --axes with two vectors [a, b]")
        _emit(_json({"state": name, "correlation": two_qubit_correlation(two, axes[0], axes[1]),
                     "axes": axes.tolist()}), cfg)
        return
    if name is not None and name not in NAMED_3:
        raise click.UsageError(f"unknown state {name!r}")
    if formalism == "3d":
        if name is not None:
            raise click.UsageError("the 3d formalism needs a decay state (--x1/--x2)")
        t = _event(x1, x2, alpha, beta, gamma)
        psi, form = embed_3d(_decay_state(t, sz), t), SPIN1_3D
    else:
        if name is not None:
            psi = NAMED_3[name]()
        else:
            psi = _decay_state(_event(x1, x2, alpha, beta, gamma), sz)
        form = QUBIT_2D
    if axes is not None:
        if axes.shape != (6, 3):
            raise click.UsageError("three-party --axes needs six vectors")
        T = correlation_tensor(psi, form)
        settings = axes.reshape(3, 2, 3)
        combo = mermin_value if objective == "mermin" else svetlichny_value
        value = combo(lambda a, b, c: float(a @ (T @ c) @ b), settings)
        _emit(_json({"objective": objective, "formalism": form, "value": value,
                     "settings": settings.tolist()}), cfg)
        return
    result = optimize_settings(psi, objective, form, restarts=restarts, seed=cfg.seed)
    _emit(_json(result.to_json()), cfg)


@cli.command()
@click.option("--n", "n", type=int, required=True, help="Number of events.")
@click.option("--weighting", type=click.Choice(["uniform", "matrix-element"]), default="uniform",
              show_default=True, help="Flat phase space or |M|^2 rejection sampling.")
@click.option("--sz", type=str, default="0", callback=_sz, show_default=True,
              help="Spin projection used for each event's stored state.")
@common_options
@handle_errors
def sample(n, weighting, sz, config, seed, threads, output, fmt):
    """Monte Carlo events as JSON lines (event, state, weight)."""
    cfg = _resolve(locals(), seed=seed, threads=threads, output=output, format=fmt)
    result = sample_events(n, weighting, cfg.seed, s_z=sz)
    lines = [json.dumps(e.to_json()) for e in result.events]
    _emit("\n".join(lines), cfg)
    click.echo(
        f"{len(result.events)} events, {result.trials} trials, "
        f"acceptance {result.acceptance_rate:.6f}", err=True,
    )


def main():
    cli(prog_name="opsent")


if __name__ == "__main__":
    main()
