"""Timed gate schedules for the ring experiment and the planar benchmark.

A :class:`Schedule` is a list of moments, each holding the operations that
start at one instant.  Builders emit fully padded timelines: every qubit is
covered by gates, idles, measurements, or resets from t = 0 to the end of
the schedule, which `validate` enforces.

Ring layout for the five-qubit code: ten qubits on a ring, data qubits at
even positions and ancillas at odd positions when a cycle begins.  Each
two-qubit series swaps its pairs, so data drift +1 position per series
(+4 per cycle) while ancillas drift -4, returning both species to their
home parity by the time the ancillas are measured.

Every two-qubit interaction is a flux-style iSWAP immediately followed by
virtual S-dagger corrections on both qubits, leaving SWAP followed by CZ as
the net gate.  With ancillas framed by Hadamards at the cycle edges and the
data frame toggled by the two mid-cycle Hadamard layers, each data qubit
couples to its four consecutive ancillas as Z, X, X, Z: the stabilizer
pattern of the code, one generator per ancilla.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import codes

DATA_SITES = (0, 2, 4, 6, 8)
ANCILLA_SITES = (1, 3, 5, 7, 9)

# Durations in ns.
T_1Q = 20.0
T_2Q = 40.0
T_MEAS = 300.0
T_RESET = 300.0
CYCLE_NS = 4 * T_1Q + 4 * T_2Q + T_MEAS + T_RESET  # 840

_VALID_OPS = {
    "prep_gate", "basis_gate", "h", "iswap", "sdg_sdg", "cz", "ry",
    "idle", "measure", "reset",
}


@dataclass(frozen=True)
class Op:
    name: str
    sites: tuple[int, ...]
    duration: float
    label: str | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.name not in _VALID_OPS:
            raise ValueError(f"unknown op {self.name!r}")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))


@dataclass
class Moment:
    start: float
    ops: list[Op] = field(default_factory=list)


@dataclass
class Schedule:
    n_qubits: int
    moments: list[Moment] = field(default_factory=list)

    @property
    def duration(self) -> float:
        end = 0.0
        for m in self.moments:
            for op in m.ops:
                end = max(end, m.start + op.duration)
        return end

    def validate(self) -> None:
        """Check ordering, site ranges, overlaps, and gap-free coverage."""
        starts = [m.start for m in self.moments]
        if starts != sorted(starts) or len(set(starts)) != len(starts):
            raise ValueError("moments must be sorted with unique start times")
        intervals: dict[int, list[tuple[float, float]]] = {q: [] for q in range(self.n_qubits)}
        for m in self.moments:
            for op in m.ops:
                for s in op.sites:
                    if not 0 <= s < self.n_qubits:
                        raise ValueError(f"site {s} out of range")
                    if op.duration > 0:
                        intervals[s].append((m.start, m.start + op.duration))
        total = self.duration
        for q, spans in intervals.items():
            spans.sort()
            t = 0.0
            for a, b in spans:
                if a > t + 1e-9:
                    raise ValueError(f"qubit {q} has a gap at t = {t}")
                if a < t - 1e-9:
                    raise ValueError(f"qubit {q} has overlapping ops at t = {a}")
                t = b
            if abs(t - total) > 1e-9:
                raise ValueError(f"qubit {q} timeline ends at {t}, schedule at {total}")

    def add(self, start: float, op: Op) -> None:
        for m in self.moments:
            if abs(m.start - start) < 1e-9:
                m.ops.append(op)
                return
        self.moments.append(Moment(start, [op]))
        self.moments.sort(key=lambda m: m.start)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "moments": [
                {
                    "start": m.start,
                    "ops": [
                        {
                            "name": op.name,
                            "sites": list(op.sites),
                            "duration": op.duration,
                            **({"label": op.label} if op.label is not None else {}),
                            **({"angle": op.angle} if op.angle is not None else {}),
                        }
                        for op in m.ops
                    ],
                }
                for m in self.moments
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "Schedule":
        sched = cls(int(d["n_qubits"]))
        for m in d["moments"]:
            moment = Moment(float(m["start"]))
            for o in m["ops"]:
                moment.ops.append(
                    Op(
                        o["name"],
                        tuple(o["sites"]),
                        float(o["duration"]),
                        o.get("label"),
                        o.get("angle"),
                    )
                )
            sched.moments.append(moment)
        return sched

    @classmethod
    def from_json(cls, s: str) -> "Schedule":
        return cls.from_dict(json.loads(s))


# ----------------------------------------------------------------------
# Five-qubit code on the ten-qubit ring
# ----------------------------------------------------------------------

def series_pairs(series: int) -> tuple[tuple[int, int], ...]:
    """Interaction pairs of the four two-qubit series (1-based index)."""
    if series in (1, 3):
        return tuple((2 * i, 2 * i + 1) for i in range(5))
    if series in (2, 4):
        return tuple(((2 * i + 1), (2 * i + 2) % 10) for i in range(5))
    raise ValueError("series must be 1..4")


def generator_at(position: int, cycle: int) -> int:
    """Index of the generator reported by the ancilla measured at a position.

    The ancilla read out at odd ring position q collected kickbacks
    Z(q+3) X(q+1) X(q-1) Z(q-3) in position space.  Data labels drift by
    -2 per completed cycle, rotating the generator assignment.
    """
    if position % 2 == 0:
        raise ValueError("measurement positions are odd")
    return ((position + 7) // 2 - 2 * (cycle - 1)) % 5


def data_label_at(position: int, cycle: int) -> int:
    """Which data qubit sits at an even position when a cycle begins."""
    if position % 2 == 1:
        raise ValueError("data positions are even at cycle start")
    return (position // 2 - 2 * (cycle - 1)) % 5


def five_qubit_cycle(sched: Schedule, base: float) -> None:
    """Append one 840 ns syndrome cycle starting at `base`."""
    layer_starts = (base, base + 60.0, base + 160.0, base + 220.0)
    series_starts = (base + 20.0, base + 80.0, base + 120.0, base + 180.0)
    # series first: the virtual corrections trailing a series share a start
    # time with the next layer and must be applied before it
    for k, t in enumerate(series_starts):
        for pair in series_pairs(k + 1):
            sched.add(t, Op("iswap", pair, T_2Q))
            sched.add(t + T_2Q, Op("sdg_sdg", pair, 0.0))
    for t in layer_starts:
        for s in ANCILLA_SITES:
            sched.add(t, Op("h", (s,), T_1Q))
        for s in DATA_SITES:
            sched.add(t, Op("idle", (s,), T_1Q))
    t_meas = base + 240.0
    for s in ANCILLA_SITES:
        sched.add(t_meas, Op("measure", (s,), T_MEAS))
    for s in DATA_SITES:
        sched.add(t_meas, Op("idle", (s,), T_MEAS))
    t_reset = base + 540.0
    for s in ANCILLA_SITES:
        sched.add(t_reset, Op("reset", (s,), T_RESET))
    for s in DATA_SITES:
        sched.add(t_reset, Op("idle", (s,), T_RESET))


def five_qubit_experiment(state: str, n_cycles: int) -> Schedule:
    """Prep layer, n_cycles syndrome cycles, and a final data readout.

    The data qubits are prepared in the five-fold product of a cardinal
    state by its prep gate; the final stage applies the inverse gate and
    measures the data in the computational basis.
    """
    if state not in codes.CARDINAL_STATES:
        raise ValueError(f"unknown cardinal state {state!r}")
    if n_cycles < 1:
        raise ValueError("need at least one cycle")
    label = _PREP_FOR_STATE[state]
    sched = Schedule(10)
    for s in DATA_SITES:
        sched.add(0.0, Op("prep_gate", (s,), T_1Q, label=label))
    for s in ANCILLA_SITES:
        sched.add(0.0, Op("idle", (s,), T_1Q))
    for c in range(n_cycles):
        five_qubit_cycle(sched, T_1Q + c * CYCLE_NS)
    t0 = T_1Q + n_cycles * CYCLE_NS
    for s in DATA_SITES:
        sched.add(t0, Op("basis_gate", (s,), T_1Q, label=label))
    for s in ANCILLA_SITES:
        sched.add(t0, Op("idle", (s,), T_1Q))
    for s in DATA_SITES:
        sched.add(t0 + T_1Q, Op("measure", (s,), T_MEAS))
    for s in ANCILLA_SITES:
        sched.add(t0 + T_1Q, Op("idle", (s,), T_MEAS))
    return sched


_PREP_FOR_STATE = {
    "0": "I", "1": "X", "+": "H", "-": "ZH", "i+": "SH", "i-": "ZSH",
}


def encoded_experiment(n_cycles: int) -> Schedule:
    """Cycles and a computational-basis readout, with no preparation stage.

    Used when the data register is injected error-free with an encoded
    state before the first cycle, so the timeline starts at the first
    ancilla Hadamard layer and the final basis layer is a plain idle.
    """
    if n_cycles < 1:
        raise ValueError("need at least one cycle")
    sched = Schedule(10)
    for c in range(n_cycles):
        five_qubit_cycle(sched, c * CYCLE_NS)
    t0 = n_cycles * CYCLE_NS
    for s in DATA_SITES:
        sched.add(t0, Op("basis_gate", (s,), T_1Q, label="I"))
    for s in ANCILLA_SITES:
        sched.add(t0, Op("idle", (s,), T_1Q))
    for s in DATA_SITES:
        sched.add(t0 + T_1Q, Op("measure", (s,), T_MEAS))
    for s in ANCILLA_SITES:
        sched.add(t0 + T_1Q, Op("idle", (s,), T_MEAS))
    return sched


# ----------------------------------------------------------------------
# Planar code benchmark: 9 data (sites 0..8) + 8 ancillas (sites 9..16)
# ----------------------------------------------------------------------

S17_PERIOD = 800.0
S17_SPAN = 980.0


def _s17_anc_site(a: int) -> int:
    return 9 + a


def surface17_cycle(sched: Schedule, cycle: int) -> None:
    """Append one pipelined planar-code cycle (0-based cycle index).

    The X half rotates the data frame around its four CZ steps; the Z half
    runs on the bare frame while the X ancillas are being read out.  With a
    300 ns readout and 300 ns reset, the Z-ancilla reset of one cycle ends
    exactly when the ancilla is next needed, giving an 800 ns steady-state
    period and a 980 ns single-cycle span.
    """
    base = cycle * S17_PERIOD
    x_sites = [_s17_anc_site(a) for a in codes.SURFACE17_X_ANCILLAS]
    z_sites = [_s17_anc_site(a) for a in codes.SURFACE17_Z_ANCILLAS]

    for s in x_sites:
        sched.add(base, Op("ry", (s,), T_1Q, angle=+math.pi / 2))
    for s in range(9):
        sched.add(base, Op("ry", (s,), T_1Q, angle=-math.pi / 2))
    if cycle == 0:
        for s in z_sites:
            sched.add(base, Op("idle", (s,), 180.0))

    for ancillas, t0 in (
        (codes.SURFACE17_X_ANCILLAS, base + 20.0),
        (codes.SURFACE17_Z_ANCILLAS, base + 200.0),
    ):
        for step in range(4):
            t = t0 + step * T_2Q
            busy = set()
            for a in ancillas:
                d = codes.SURFACE17_CZ_STEPS[a][step]
                site = _s17_anc_site(a)
                if d is None:
                    sched.add(t, Op("idle", (site,), T_2Q))
                else:
                    sched.add(t, Op("cz", (site, d), T_2Q))
                    busy.add(d)
            for d in sorted(set(range(9)) - busy):
                sched.add(t, Op("idle", (d,), T_2Q))

    for s in x_sites:
        sched.add(base + 180.0, Op("ry", (s,), T_1Q, angle=-math.pi / 2))
    for s in range(9):
        sched.add(base + 180.0, Op("ry", (s,), T_1Q, angle=+math.pi / 2))
    for s in z_sites:
        sched.add(base + 180.0, Op("ry", (s,), T_1Q, angle=+math.pi / 2))

    for s in x_sites:
        sched.add(base + 200.0, Op("measure", (s,), T_MEAS))
        sched.add(base + 500.0, Op("reset", (s,), T_RESET))
    for s in z_sites:
        sched.add(base + 360.0, Op("ry", (s,), T_1Q, angle=-math.pi / 2))
        sched.add(base + 380.0, Op("measure", (s,), T_MEAS))
        sched.add(base + 680.0, Op("reset", (s,), T_RESET))

    for s in range(9):
        sched.add(base + 360.0, Op("idle", (s,), S17_PERIOD - 360.0))


def surface17_experiment(n_cycles: int) -> Schedule:
    """n_cycles pipelined cycles with closing idles so the timeline is tight."""
    if n_cycles < 1:
        raise ValueError("need at least one cycle")
    sched = Schedule(17)
    for c in range(n_cycles):
        surface17_cycle(sched, c)
    # close out the ragged pipeline tail
    last = (n_cycles - 1) * S17_PERIOD
    end = last + S17_SPAN
    for s in [_s17_anc_site(a) for a in codes.SURFACE17_X_ANCILLAS]:
        sched.add(last + S17_PERIOD, Op("idle", (s,), end - last - S17_PERIOD))
    for s in range(9):
        sched.add(last + S17_PERIOD, Op("idle", (s,), end - last - S17_PERIOD))
    return sched
