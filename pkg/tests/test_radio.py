import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mecsim.radio import (BaseStation, HandoverDecision, Metric, MobilityTrace, PathLossModel, RadioSample,
                          SignalClass, classify_rsrp, classify_rsrq, evaluate_handover, measure_cells,
                          path_loss, position_at, sample_cell)

WALK = MobilityTrace(((0.0, (0.0, 0.0)), (10.0, (100.0, 0.0))))


@pytest.mark.parametrize("t, expected", [(5, (50, 0)), (-1, (0, 0)), (20, (100, 0)), (0, (0, 0)), (10, (100, 0))])
def test_position_at(t, expected):
    assert position_at(WALK, t) == pytest.approx(expected)


def test_position_empty_trace():
    with pytest.raises(ValueError):
        position_at(MobilityTrace(()), 0)


def test_waypoints_must_increase():
    with pytest.raises(ValueError):
        MobilityTrace(((1.0, (0, 0)), (1.0, (1, 1))))


def test_path_loss_reference_points():
    m = PathLossModel(pl0_db=30, exponent=3.5, d0_m=1)
    assert path_loss(1.0, m) == 30
    assert path_loss(10.0, m) == pytest.approx(65.0)
    assert path_loss(100.0, m) == pytest.approx(100.0)


def test_path_loss_clamps_tiny_distance():
    m = PathLossModel()
    assert path_loss(0.0, m) == path_loss(0.1, m)


def test_shadowing_draws_from_generator():
    m = PathLossModel(shadow_sigma_db=4.0)
    a = [path_loss(100, m, np.random.default_rng(3)) for _ in range(2)]
    assert a[0] == a[1]
    samples = [path_loss(100, m, np.random.default_rng(s)) for s in range(2000)]
    assert np.std(samples) == pytest.approx(4.0, rel=0.1)
    with pytest.raises(ValueError):
        path_loss(100, m)


def _bs_at_pathloss(pl_db, model=PathLossModel()):
    # distance giving exactly pl_db on the default model
    d = model.d0_m * 10 ** ((pl_db - model.pl0_db) / (10 * model.exponent))
    return BaseStation(1, (d, 0.0), tx_power=40.0), (0.0, 0.0)


def test_single_cell_excellent():
    bs, ue = _bs_at_pathloss(110)
    s = sample_cell(bs, ue, [bs], 0.0)
    assert s.rsrp == pytest.approx(-70)
    assert classify_rsrp(s.rsrp) is SignalClass.EXCELLENT


def test_no_signal_at_high_loss():
    bs, ue = _bs_at_pathloss(150)
    s = sample_cell(bs, ue, [bs], 0.0)
    assert s.rsrp <= -110 + 1e-9
    assert classify_rsrp(s.rsrp) is SignalClass.NO_SIGNAL
    bs, ue = _bs_at_pathloss(190)
    assert sample_cell(bs, ue, [bs], 0.0).rsrp == -140


def test_equidistant_cells_equal():
    a = BaseStation(1, (0, 0))
    b = BaseStation(2, (200, 0))
    sa, sb = measure_cells((100, 0), [a, b], 0.0, PathLossModel())
    assert sa.rsrp == sb.rsrp
    assert sa.rsrq == sb.rsrq


def test_rsrq_formula_and_clamp():
    a = BaseStation(1, (0, 0))
    b = BaseStation(2, (300, 0))
    sa, sb = measure_cells((100, 0), [a, b], 0.0, PathLossModel())
    pa, pb = 40 - path_loss(100, PathLossModel()), 40 - path_loss(200, PathLossModel())
    total = 10 * math.log10(10 ** (pa / 10) + 10 ** (pb / 10))
    assert sa.rsrq == pytest.approx(max(min(pa - total, -3), -20))
    assert sb.rsrq == pytest.approx(max(min(pb - total, -3), -20))
    single = sample_cell(a, (100, 0), [a], 0.0)
    assert single.rsrq == -3


@given(st.floats(-200, 0), st.floats(-60, 20))
def test_samples_clamped(tx, offset):
    bs = BaseStation(1, (0, 0), tx_power=tx)
    other = BaseStation(2, (50, 0))
    for s in measure_cells((10, 0), [bs, other], 0.0, PathLossModel(), rsrq_offset_db=offset):
        assert -140 <= s.rsrp <= -40
        assert -20 <= s.rsrq <= -3


def test_rsrp_nonincreasing_with_distance():
    bs = BaseStation(1, (0, 0))
    vals = [sample_cell(bs, (d, 0), [bs], 0.0).rsrp for d in np.linspace(0, 3000, 301)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("rsrp, cls", [
    (-40, "Excellent"), (-70, "Excellent"), (-70.01, "Good"), (-85, "Good"), (-90, "Fair"),
    (-100, "Fair"), (-100.5, "Poor"), (-110, "NoSignal"), (-140, "NoSignal"),
])
def test_classify_rsrp(rsrp, cls):
    assert classify_rsrp(rsrp).value == cls


@pytest.mark.parametrize("rsrq, cls", [
    (-3, "Excellent"), (-6, "Excellent"), (-8, "Good"), (-10, "Good"), (-12, "Fair"), (-13, "Fair"),
    (-14, "Poor"), (-16, "NoSignal"), (-20, "NoSignal"),
])
def test_classify_rsrq(rsrq, cls):
    assert classify_rsrq(rsrq).value == cls


_RANK = {c: i for i, c in enumerate(SignalClass)}  # Excellent=0 ... NoSignal=4


@given(st.floats(-200, 0), st.floats(-200, 0))
def test_classify_monotone(a, b):
    lo, hi = sorted((a, b))
    assert _RANK[classify_rsrp(hi)] <= _RANK[classify_rsrp(lo)]
    assert _RANK[classify_rsrq(hi)] <= _RANK[classify_rsrq(lo)]


def _s(cell, value, serving=False, t=0.0):
    return RadioSample(t, cell, value, -10.0, serving)


def test_eq1_triggers():
    d = evaluate_handover(_s(1, -90, True), [_s(2, -80)], {2: 3})
    assert d == HandoverDecision(0.0, 0, 1, 2, 3, Metric.RSRP)


def test_eq1_equality_does_not_trigger():
    assert evaluate_handover(_s(1, -90, True), [_s(2, -87)], {2: 3}) is None


def test_tiebreak_lowest_cell():
    d = evaluate_handover(_s(3, -90, True), [_s(2, -80), _s(1, -80)], {1: 3, 2: 3})
    assert d.target_cell == 1


def test_strongest_qualifier_wins():
    d = evaluate_handover(_s(3, -90, True), [_s(1, -85), _s(2, -80)], {1: 3, 2: 3})
    assert d.target_cell == 2


def test_per_cell_margin_is_neighbor_margin():
    # cell 2 would qualify under 3 dB but has its own 12 dB margin
    d = evaluate_handover(_s(1, -90, True), [_s(2, -80), _s(3, -85)], {2: 12, 3: 3})
    assert d.target_cell == 3 and d.margin_used == 3


def test_rsrq_metric():
    s = RadioSample(0, 1, -90, -15, True)
    n = RadioSample(0, 2, -95, -8, False)
    assert evaluate_handover(s, [n], {2: 3}) is None
    assert evaluate_handover(s, [n], {2: 3}, metric=Metric.RSRQ).target_cell == 2


def test_time_to_trigger():
    state = {}
    margins = {2: 3}
    out = []
    for k in range(6):
        t = k * 0.2
        out.append(evaluate_handover(_s(1, -90, True, t), [_s(2, -80, t=t)], margins, 0.4,
                                     qualified_since=state))
    assert [d is not None for d in out] == [False, False, True, True, True, True]
    # a non-qualifying tick resets the timer
    evaluate_handover(_s(1, -90, True, 2.0), [_s(2, -88, t=2.0)], margins, 0.4, qualified_since=state)
    assert evaluate_handover(_s(1, -90, True, 2.2), [_s(2, -80, t=2.2)], margins, 0.4,
                             qualified_since=state) is None


def brute_force_handover(m_s, neighbors, margins):
    """Literal reading: qualify iff M_n > M_s + margin_n; max M_n, then min cell id."""
    qualifying = [(cell, m) for cell, m in neighbors if m > m_s + margins[cell]]
    if not qualifying:
        return None
    top = max(m for _, m in qualifying)
    return min(cell for cell, m in qualifying if m == top)


def test_oracle_equivalence_grid():
    rng = random.Random(99)
    for _ in range(2000):
        k = rng.randint(1, 5)
        cells = rng.sample(range(2, 12), k)
        m_s = rng.choice([-100, -95, -90, -85, -80])
        nbrs = [(c, float(rng.choice(range(-105, -70)))) for c in cells]
        margins = {c: float(rng.choice([0, 1, 2, 3, 4, 6])) for c in cells}
        d = evaluate_handover(_s(1, m_s, True), [_s(c, m) for c, m in nbrs], margins)
        assert (d.target_cell if d else None) == brute_force_handover(m_s, nbrs, margins)


@given(st.floats(0.1, 10), st.lists(st.floats(-1, 1), min_size=1, max_size=100), st.floats(-110, -60))
def test_ping_pong_suppressed(m, deltas, base):
    # |M_n - M_s| <= m at every tick, both directions
    for frac in deltas:
        a, b = base, base + frac * m
        assert evaluate_handover(_s(1, a, True), [_s(2, b)], {1: m, 2: m}) is None
        assert evaluate_handover(_s(2, b, True), [_s(1, a)], {1: m, 2: m}) is None


def test_decision_requires_distinct_cells():
    with pytest.raises(ValueError):
        HandoverDecision(0, 1, 2, 2, 3, Metric.RSRP)


def test_negative_margin_rejected():
    with pytest.raises(ValueError):
        BaseStation(1, (0, 0), ho_margin=-1)
