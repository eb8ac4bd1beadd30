import json

import pytest

from evannot.anomalies import compute_deltas, find_anomalies
from evannot.cli import main
from evannot.events import serialize_events
from evannot.simulate import SaccadeScript, SimulationConfig, scripted_recording
from evannot.store import load_annotations


@pytest.fixture(scope="module")
def recording(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    scripts = [
        SaccadeScript(20, 28, (120.0, 130.0), (180.0, 130.0)),
        SaccadeScript(50, 58, (180.0, 130.0), (150.0, 90.0)),
        SaccadeScript(80, 88, (150.0, 90.0), (120.0, 130.0)),
    ]
    stream, truth = scripted_recording(scripts, SimulationConfig(n_frames=110, seed=42))
    path = tmp / "rec.txt"
    serialize_events(stream, path)
    return tmp, path, stream, truth


@pytest.fixture(scope="module")
def annotated(recording):
    tmp, events_path, _, _ = recording
    out = tmp / "annotations.csv"
    report = tmp / "report.json"
    rc = main(["annotate", str(events_path), "--output", str(out), "--report", str(report)])
    assert rc == 0
    return out, report


def test_validate(recording, capsys):
    _, events_path, stream, _ = recording
    assert main(["validate", str(events_path)]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["count"] == stream.count


def test_validate_missing_file_nonzero(tmp_path, capsys):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert main(["validate", str(empty)]) == 1
    assert "error" in capsys.readouterr().err


def test_render(recording, tmp_path):
    _, events_path, _, _ = recording
    out = tmp_path / "f0.png"
    rc = main(["render", str(events_path), "--frame", "0", "--output", str(out),
               "--sparse-csv"])
    assert rc == 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert (tmp_path / "f0.csv").read_text().startswith("x,y,pos,neg")


def test_annotate_run_report(annotated, recording):
    out, report_path = annotated
    report = json.loads(report_path.read_text())
    assert report["saccade_count"] == 3
    annotations = load_annotations(out)
    assert len(annotations) == report["frame_count"]


def test_annotate_deterministic(recording, tmp_path):
    _, events_path, _, _ = recording
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["annotate", str(events_path), "--output", str(a)]) == 0
    assert main(["annotate", str(events_path), "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_annotate_empty_file_fails(tmp_path, capsys):
    events = tmp_path / "empty.txt"
    events.write_text("")
    assert main(["annotate", str(events), "--output", str(tmp_path / "o.csv")]) == 1


def test_stats_matches_module(annotated, capsys, tmp_path):
    out, _ = annotated
    json_path = tmp_path / "stats.json"
    assert main(["stats", str(out), "--json", str(json_path)]) == 0
    from evannot.store import compute_stats

    expected = compute_stats(load_annotations(out), 30)
    body = json.loads(json_path.read_text())
    assert body["annotations"] == expected.as_dict()
    assert body["Total"] == expected.as_dict()
    printed = capsys.readouterr().out
    assert "Saccade Counts" in printed


def test_anomalies_equals_library_call(annotated, tmp_path, capsys):
    out, _ = annotated
    report_path = tmp_path / "anoms.json"
    plot_path = tmp_path / "anoms.png"
    rc = main(["anomalies", str(out), "--threshold", "10",
               "--output", str(report_path), "--plot", str(plot_path)])
    assert rc == 0
    body = json.loads(report_path.read_text())
    expected = find_anomalies(compute_deltas(load_annotations(out)), 10.0)
    assert body == expected.as_dict()
    assert plot_path.stat().st_size > 0


def test_config_file_overrides_flags(recording, tmp_path):
    _, events_path, _, _ = recording
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"saccade_threshold": 100000}))
    out = tmp_path / "quiet.csv"
    rc = main(["annotate", str(events_path), "--output", str(out),
               "--saccade-threshold", "150", "--config", str(config)])
    assert rc == 0
    annotations = load_annotations(out)
    assert all(a.saccade_state.value == "NONE" for a in annotations)


def test_simulate_command(tmp_path):
    out = tmp_path / "sim.txt"
    assert main(["simulate", "--output", str(out), "--frames", "60"]) == 0
    assert main(["validate", str(out)]) == 0
