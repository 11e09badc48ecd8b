import json
import os

import pytest

from movae.harness.records import MetricsRecord
from movae.harness.records import metrics_record_validate
from movae.harness.records import metrics_record_write
from movae.model.generalize import TraceEntry
from movae.movaeexception import MovaeConsistencyError
from movae.movaeexception import MovaeIOError


def _record():
    record = MetricsRecord("semisup", {"seed": 1, "psi": 10})
    record.repeat_add(0.5, trace=[TraceEntry(0, 40, 0.4, 0, 0),
                                  TraceEntry(1, 30, 0.5, 10, 2)])
    record.repeat_add(0.7, trace=[TraceEntry(0, 40, 0.6, 0, 0),
                                  TraceEntry(1, 30, 0.7, 10, 0)])
    return record


def test_aggregate_mean_std():
    aggregate = _record().aggregate()
    assert aggregate["accuracy"]["mean"] == pytest.approx(0.6)
    # population stddev
    assert aggregate["accuracy"]["std"] == pytest.approx(0.1)
    assert aggregate["knn_accuracy"] is None
    assert [point["iteration"] for point in aggregate["trace"]] == [0, 1]
    assert aggregate["trace"][0]["mean"] == pytest.approx(0.5)
    assert aggregate["trace"][1]["std"] == pytest.approx(0.1)
    assert aggregate["trace"][1]["repeats"] == 2


def test_aggregate_single_repeat_zero_std():
    record = MetricsRecord("supervised", {})
    record.repeat_add(0.9)
    assert record.aggregate()["accuracy"] == {"mean": 0.9, "std": 0.0}


def test_aggregate_knn():
    record = MetricsRecord("oneshot", {})
    record.repeat_add(0.8, knn_accuracy=0.6, random_guess=0.2)
    record.repeat_add(1.0, knn_accuracy=0.4, random_guess=0.2)
    knn = record.aggregate()["knn_accuracy"]
    assert knn["mean"] == pytest.approx(0.5)
    assert knn["std"] == pytest.approx(0.1)
    assert record.repeats[1]["random_guess"] == 0.2


def test_aggregate_without_repeats():
    with pytest.raises(MovaeConsistencyError):
        MetricsRecord("supervised", {}).aggregate()


def test_repeat_entries():
    record = _record()
    assert [entry["repeat"] for entry in record.repeats] == [0, 1]
    assert record.repeats[0]["trace"][1] == {
        "iteration": 1, "pool_size": 30, "accuracy": 0.5, "selected": 10,
        "skipped": 2}


def test_to_json_validates():
    data = json.loads(_record().to_json())
    metrics_record_validate(data)
    assert data["format"] == "movae-metrics/1"
    assert data["config"] == {"seed": 1, "psi": 10}


def test_validate_rejects_tampering():
    data = json.loads(_record().to_json())
    data["aggregate"]["accuracy"]["mean"] = 0.9
    with pytest.raises(MovaeConsistencyError):
        metrics_record_validate(data)
    data = json.loads(_record().to_json())
    del data["repeats"][0]["trace"][0]["skipped"]
    with pytest.raises(MovaeConsistencyError):
        metrics_record_validate(data)
    with pytest.raises(MovaeConsistencyError):
        metrics_record_validate({"format": "other"})


def test_phase_timings():
    record = MetricsRecord("supervised", {})
    with record.phase("train"):
        pass
    with record.phase("train"):
        pass
    assert len(record.timings["train"]) == 2
    assert all(seconds >= 0 for seconds in record.timings["train"])


def test_metrics_record_write(tmp_path):
    record = _record()
    with record.phase("train"):
        pass
    out = str(tmp_path / "run")
    summary = metrics_record_write(record, out)
    assert summary == os.path.join(out, "summary.json")
    assert sorted(os.listdir(out)) == ["summary.json", "timings.json",
                                      "trace-0.csv", "trace-1.csv"]
    with open(os.path.join(out, "trace-1.csv")) as handle:
        assert handle.read() == ("iteration,pool_size,accuracy\n"
                                 "0,40,0.6\n1,30,0.7\n")
    with open(summary) as handle:
        metrics_record_validate(json.load(handle))
    with open(os.path.join(out, "timings.json")) as handle:
        assert list(json.load(handle)) == ["train"]


def test_metrics_record_write_summary_is_stable(tmp_path):
    first = str(tmp_path / "a")
    second = str(tmp_path / "b")
    metrics_record_write(_record(), first)
    metrics_record_write(_record(), second)
    with open(os.path.join(first, "summary.json")) as a, \
            open(os.path.join(second, "summary.json")) as b:
        assert a.read() == b.read()


def test_metrics_record_write_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(MovaeIOError):
        metrics_record_write(_record(), str(blocker / "run"))
