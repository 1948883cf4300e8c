import math

import numpy as np
import pytest
from hypothesis import reject
from hypothesis import strategies as st

from opsent.kinematics import Orientation, build_event, dalitz_sample


def random_event(rng, planar=False, min_x=1e-3):
    """Random interior event; planar keeps the decay plane normal on z."""
    while True:
        d = dalitz_sample(*rng.uniform(size=2))
        if np.all(d.x > min_x):
            break
    if planar:
        o = Orientation(rng.uniform(0, 2 * math.pi), 0.0, 0.0)
    else:
        o = Orientation(*rng.uniform(0, 2 * math.pi, size=3))
    return build_event(d, o)


def random_events(seed, n, planar=False):
    rng = np.random.default_rng(seed)
    return [random_event(rng, planar) for _ in range(n)]


def ore_powell(x):
    """Helicity-summed, spin-averaged weight from the energy fractions alone."""
    x1, x2, x3 = x
    return 64.0 / 3.0 * (
        ((1 - x1) / (x2 * x3)) ** 2 + ((1 - x2) / (x1 * x3)) ** 2 + ((1 - x3) / (x1 * x2)) ** 2
    )


def random_unit(rng, size=None):
    shape = () if size is None else np.atleast_1d(size).tolist()
    v = rng.normal(size=(*shape, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


unit = st.floats(0.0, 1.0, allow_nan=False)
angle = st.floats(-10.0, 10.0, allow_nan=False)


@st.composite
def events(draw, min_x=1e-3):
    d = dalitz_sample(draw(unit), draw(unit))
    if not np.all(d.x > min_x):
        reject()
    o = Orientation(draw(angle), draw(angle), draw(angle))
    return build_event(d, o)


@pytest.fixture
def rng():
    return np.random.default_rng(20171)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            for name, value in getattr(rep, "user_properties", []):
                if name == "acceptance":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
