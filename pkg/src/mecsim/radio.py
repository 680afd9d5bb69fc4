"""UE mobility, log-distance RSRP/RSRQ synthesis and the margin-based
handover trigger."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

RSRP_RANGE = (-140.0, -40.0)
RSRQ_RANGE = (-20.0, -3.0)
MIN_DISTANCE_M = 0.1

Position = tuple[float, float]


class Metric(str, Enum):
    RSRP = "RSRP"
    RSRQ = "RSRQ"


class SignalClass(str, Enum):
    EXCELLENT = "Excellent"
    GOOD = "Good"
    FAIR = "Fair"
    POOR = "Poor"
    NO_SIGNAL = "NoSignal"


@dataclass(frozen=True)
class BaseStation:
    cell_id: int
    position: Position
    tx_power: float = 40.0
    ho_margin: float = 3.0

    def __post_init__(self):
        if self.ho_margin < 0:
            raise ValueError(f"cell {self.cell_id}: ho_margin must be >= 0")


@dataclass(frozen=True)
class MobilityTrace:
    """Piecewise-linear walk; positions are clamped outside the waypoint span."""

    waypoints: tuple[tuple[float, Position], ...]

    def __post_init__(self):
        times = [t for t, _ in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")


def position_at(trace: MobilityTrace, t: float) -> Position:
    wps = trace.waypoints
    if not wps:
        raise ValueError("mobility trace has no waypoints")
    if t <= wps[0][0]:
        return tuple(map(float, wps[0][1]))
    if t >= wps[-1][0]:
        return tuple(map(float, wps[-1][1]))
    for (t0, p0), (t1, p1) in zip(wps, wps[1:]):
        if t0 <= t <= t1:
            f = (t - t0) / (t1 - t0)
            return (p0[0] + f * (p1[0] - p0[0]), p0[1] + f * (p1[1] - p0[1]))
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class PathLossModel:
    pl0_db: float = 30.0
    exponent: float = 3.5
    d0_m: float = 1.0
    shadow_sigma_db: float = 0.0


def path_loss(distance_m: float, model: PathLossModel, rng: np.random.Generator | None = None) -> float:
    """Log-distance path loss in dB with optional lognormal shadowing."""
    d = max(distance_m, MIN_DISTANCE_M)
    pl = model.pl0_db + 10.0 * model.exponent * math.log10(d / model.d0_m)
    if model.shadow_sigma_db > 0:
        if rng is None:
            raise ValueError("shadowing requires a random generator")
        pl += float(rng.normal(0.0, model.shadow_sigma_db))
    return pl


@dataclass(frozen=True)
class RadioSample:
    t: float
    cell_id: int
    rsrp: float
    rsrq: float
    serving: bool = False

    def metric(self, which: Metric) -> float:
        return self.rsrp if Metric(which) is Metric.RSRP else self.rsrq


def _clamp(x: float, bounds: tuple[float, float]) -> float:
    return min(max(x, bounds[0]), bounds[1])


def measure_cells(
    ue_pos: Position,
    all_bs: Sequence[BaseStation],
    t: float,
    model: PathLossModel,
    rng: np.random.Generator | None = None,
    serving_cell: int | None = None,
    rsrq_offset_db: float = 0.0,
) -> list[RadioSample]:
    """Sample every cell at once, drawing one shadowing value per cell.

    RSRQ is the cell's unclamped RSRP relative to the total received power
    over all cells, plus an offset, then clamped.
    """
    if not all_bs:
        raise ValueError("at least one base station is required")
    raw = []
    for bs in all_bs:
        d = math.dist(ue_pos, bs.position)
        raw.append(bs.tx_power - path_loss(d, model, rng))
    total_mw = sum(10.0 ** (p / 10.0) for p in raw)
    total_dbm = 10.0 * math.log10(total_mw)
    return [
        RadioSample(
            t=t,
            cell_id=bs.cell_id,
            rsrp=_clamp(p, RSRP_RANGE),
            rsrq=_clamp(p - total_dbm + rsrq_offset_db, RSRQ_RANGE),
            serving=bs.cell_id == serving_cell,
        )
        for bs, p in zip(all_bs, raw)
    ]


def sample_cell(
    bs: BaseStation,
    ue_pos: Position,
    all_bs: Sequence[BaseStation],
    t: float,
    model: PathLossModel = PathLossModel(),
    rng: np.random.Generator | None = None,
    serving: bool = False,
    rsrq_offset_db: float = 0.0,
) -> RadioSample:
    samples = measure_cells(ue_pos, all_bs, t, model, rng, bs.cell_id if serving else None, rsrq_offset_db)
    return next(s for s in samples if s.cell_id == bs.cell_id)


def classify_rsrp(rsrp: float) -> SignalClass:
    if rsrp >= -70:
        return SignalClass.EXCELLENT
    if rsrp >= -85:
        return SignalClass.GOOD
    if rsrp >= -100:
        return SignalClass.FAIR
    if rsrp > -110:
        return SignalClass.POOR
    return SignalClass.NO_SIGNAL


def classify_rsrq(rsrq: float) -> SignalClass:
    if rsrq >= -6:
        return SignalClass.EXCELLENT
    if rsrq >= -10:
        return SignalClass.GOOD
    if rsrq >= -13:
        return SignalClass.FAIR
    if rsrq > -16:
        return SignalClass.POOR
    return SignalClass.NO_SIGNAL


@dataclass(frozen=True)
class HandoverDecision:
    t: float
    ue_id: int
    source_cell: int
    target_cell: int
    margin_used: float
    metric: Metric

    def __post_init__(self):
        if self.source_cell == self.target_cell:
            raise ValueError("handover source and target must differ")


def evaluate_handover(
    serving: RadioSample,
    neighbors: Sequence[RadioSample],
    margins: Mapping[int, float],
    ttt: float = 0.0,
    *,
    metric: Metric = Metric.RSRP,
    ue_id: int = 0,
    qualified_since: dict[int, float] | None = None,
) -> HandoverDecision | None:
    """Apply ``M_n > M_s + margin(n)`` to each neighbor.

    With ``ttt > 0`` a neighbor must keep qualifying for ``ttt`` seconds;
    ``qualified_since`` carries the first-qualifying times between calls
    and is updated in place. Among qualifiers the strongest wins, ties go
    to the lowest cell id.
    """
    if ttt > 0 and qualified_since is None:
        raise ValueError("time-to-trigger needs a qualified_since state dict")
    m_s = serving.metric(metric)
    best: RadioSample | None = None
    for n in neighbors:
        if n.cell_id == serving.cell_id:
            continue
        qualifies = n.metric(metric) > m_s + margins[n.cell_id]
        if qualified_since is not None:
            if not qualifies:
                qualified_since.pop(n.cell_id, None)
                continue
            first = qualified_since.setdefault(n.cell_id, n.t)
            if n.t - first < ttt:
                continue
        elif not qualifies:
            continue
        m_n = n.metric(metric)
        if best is None or m_n > best.metric(metric) or (m_n == best.metric(metric) and n.cell_id < best.cell_id):
            best = n
    if best is None:
        return None
    return HandoverDecision(
        t=serving.t,
        ue_id=ue_id,
        source_cell=serving.cell_id,
        target_cell=best.cell_id,
        margin_used=margins[best.cell_id],
        metric=Metric(metric),
    )
