import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evannot.anomalies import (
    AnomalyReport,
    DeltaEntry,
    DeltaSeries,
    compute_deltas,
    find_anomalies,
    plot_deltas,
)
from evannot.saccades import SaccadeState
from evannot.store import BlinkState, FrameAnnotation


def ann(i, center=None, count=50, sac=SaccadeState.NONE, blink=BlinkState.NONE):
    return FrameAnnotation(frame_index=i, t_start_us=i * 5000, event_count=count,
                           center=center, saccade_state=sac, blink_state=blink)


def test_adjacent_pair_delta():
    deltas = compute_deltas([ann(5, (10.0, 10.0)), ann(6, (11.0, 10.0))])
    assert deltas.entries == [DeltaEntry(5, 6, 1.0, 0.0, 1)]


def test_single_center_empty_series():
    assert len(compute_deltas([ann(3, (10.0, 10.0)), ann(4)])) == 0


def test_gap_frames_across_unannotated():
    deltas = compute_deltas([ann(2, (0.0, 0.0)), ann(3), ann(7, (4.0, -2.0))])
    assert deltas.entries == [DeltaEntry(2, 7, 4.0, -2.0, 5)]


def test_deltas_match_brute_force_scan():
    rng = np.random.default_rng(0)
    annotations = []
    for i in range(200):
        if rng.random() < 0.5:
            annotations.append(ann(i, (float(rng.uniform(0, 346)), float(rng.uniform(0, 260)))))
        else:
            annotations.append(ann(i))
    deltas = compute_deltas(annotations)
    centered = [a for a in annotations if a.center is not None]
    expected = [
        (p.frame_index, n.frame_index, n.center[0] - p.center[0],
         n.center[1] - p.center[1], n.frame_index - p.frame_index)
        for p, n in zip(centered, centered[1:])
    ]
    got = [(e.frame_index_prev, e.frame_index_next, e.dx, e.dy, e.gap_frames)
           for e in deltas]
    assert got == expected


def test_find_anomalies_simple():
    series = DeltaSeries([DeltaEntry(0, 1, 1.0, 0.0, 1)])
    assert find_anomalies(series, 5.0).anomalies == []
    series = DeltaSeries([DeltaEntry(0, 1, 20.0, 0.0, 1)])
    assert len(find_anomalies(series, 5.0).anomalies) == 1


def test_per_axis_metric_uses_max_axis():
    series = DeltaSeries([DeltaEntry(0, 1, 3.0, -9.0, 1)])
    assert len(find_anomalies(series, 8.0).anomalies) == 1
    assert len(find_anomalies(series, 9.0).anomalies) == 0  # strict


def test_euclidean_metric():
    series = DeltaSeries([DeltaEntry(0, 1, 3.0, 4.0, 1)])
    assert len(find_anomalies(series, 4.9, metric="euclidean").anomalies) == 1
    assert len(find_anomalies(series, 5.0, metric="euclidean").anomalies) == 0


def test_gap_scaling_flag():
    series = DeltaSeries([DeltaEntry(0, 3, 15.0, 0.0, 3)])
    assert len(find_anomalies(series, 10.0).anomalies) == 1
    assert len(find_anomalies(series, 10.0, scale_by_gap=True).anomalies) == 0


def test_threshold_validation():
    with pytest.raises(ValueError):
        find_anomalies(DeltaSeries([]), 0.0)
    with pytest.raises(ValueError):
        find_anomalies(DeltaSeries([]), 5.0, metric="manhattan")


def random_series(rng, n):
    return DeltaSeries([
        DeltaEntry(i, i + 1, float(rng.normal(0, 6)), float(rng.normal(0, 6)), 1)
        for i in range(n)
    ])


def test_random_series_equals_brute_force_filter():
    rng = np.random.default_rng(1)
    series = random_series(rng, 500)
    report = find_anomalies(series, 8.0)
    expected = [e for e in series if max(abs(e.dx), abs(e.dy)) > 8.0]
    assert report.anomalies == expected


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.tuples(st.floats(-30, 30), st.floats(-30, 30)), max_size=40),
    st.floats(0.1, 25), st.floats(0, 10),
)
def test_monotonicity_in_threshold(pairs, threshold, bump):
    series = DeltaSeries([
        DeltaEntry(i, i + 1, dx, dy, 1) for i, (dx, dy) in enumerate(pairs)
    ])
    low = find_anomalies(series, threshold).anomalies
    high = find_anomalies(series, threshold + bump).anomalies
    assert set(e.id for e in high) <= set(e.id for e in low)


def test_correction_changes_only_adjacent_entries():
    centers = {i: (float(i), 0.0) for i in range(10)}
    before = compute_deltas([ann(i, c) for i, c in centers.items()])
    centers[5] = (50.0, 0.0)
    after = compute_deltas([ann(i, c) for i, c in centers.items()])
    for b, a in zip(before, after):
        if 5 in (b.frame_index_prev, b.frame_index_next):
            continue
        assert a == b


def test_plot_writes_figure(tmp_path):
    annotations = [
        ann(0, (10.0, 10.0)), ann(1, (11.0, 10.0), sac=SaccadeState.SACCADE_START_END),
        ann(2, (40.0, 10.0), blink=BlinkState.BLINK_START),
        ann(3, (41.0, 11.0), blink=BlinkState.BLINK_END),
    ]
    deltas = compute_deltas(annotations)
    report = find_anomalies(deltas, 10.0)
    out = tmp_path / "deltas.png"
    plot_deltas(annotations, deltas, report, path=out)
    assert out.exists() and out.stat().st_size > 0
