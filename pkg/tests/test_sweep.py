"""Experiment matrix and the pull-scheduled dispatcher."""
import io
from pathlib import Path

import pytest

from diffnet.cascades import Cascade, CascadeSet, write_cascades
from diffnet.inference import InferenceConfig
from diffnet.sweep import ExperimentTask, build_matrix, dispatch

CONFIG = InferenceConfig(k=1)


def make_dataset(path: Path, seed: int, cascades: int = 6, nodes: int = 8) -> None:
    labels = {i: str(i) for i in range(nodes)}
    rows = []
    for idx in range(cascades):
        first = (seed + idx) % nodes
        second = (seed + idx + 1 + idx % 3) % nodes
        if first == second:
            second = (second + 1) % nodes
        third = (first + second + 1) % nodes
        events = [(first, 0.0), (second, 1.0 + (idx % 5) * 0.25)]
        if third not in (first, second):
            events.append((third, 3.0 + idx))
        rows.append(Cascade(f"c{idx}", events))
    write_cascades(CascadeSet(labels, rows), path)


# -- matrix ---------------------------------------------------------------------

def test_single_cell_matrix(tmp_path):
    ds = tmp_path / "a.cascades"
    tasks = build_matrix([ds], [5], CONFIG, tmp_path / "out")
    assert len(tasks) == 1
    assert tasks[0].k == 5
    assert tasks[0].config.k == 5
    assert tasks[0].output_path == tmp_path / "out" / "a.k5.edges"


def test_full_matrix_is_cross_product(tmp_path):
    datasets = [tmp_path / f"set{i:02d}.cascades" for i in range(19)]
    ks = [100, 250, 500, 1000, 2000, 5000, 10000, 50000]
    tasks = build_matrix(datasets, ks, CONFIG, tmp_path)
    assert len(tasks) == 152
    assert len({t.output_path for t in tasks}) == 152
    keys = [(str(t.dataset_path), t.k) for t in tasks]
    assert keys == sorted(keys)


def test_empty_inputs_rejected(tmp_path):
    with pytest.raises(ValueError, match="datasets"):
        build_matrix([], [1], CONFIG, tmp_path)
    with pytest.raises(ValueError, match="ks"):
        build_matrix([tmp_path / "a"], [], CONFIG, tmp_path)
    with pytest.raises(ValueError, match=">= 1"):
        build_matrix([tmp_path / "a"], [0], CONFIG, tmp_path)


def test_duplicate_datasets_rejected(tmp_path):
    with pytest.raises(ValueError, match="collide"):
        build_matrix([tmp_path / "a.cascades", tmp_path / "a.cascades"], [1], CONFIG, tmp_path)
    # same stem through different directories collides too
    with pytest.raises(ValueError, match="collide"):
        build_matrix([tmp_path / "x" / "a.csc", tmp_path / "y" / "a.csc"], [1], CONFIG, tmp_path)


# -- dispatch ---------------------------------------------------------------------

def test_zero_workers_rejected():
    with pytest.raises(ValueError, match="worker_count"):
        dispatch([], 0)


def test_empty_task_list():
    result = dispatch([], 2)
    assert result.completed == []
    assert result.failed == []


def run_matrix(tmp_path, out_name, workers, ks=(3, 8), n_datasets=3, resume=False, log=None):
    datasets = []
    for i in range(n_datasets):
        path = tmp_path / f"data{i}.cascades"
        if not path.exists():
            make_dataset(path, seed=i)
        datasets.append(path)
    tasks = build_matrix(datasets, list(ks), CONFIG, tmp_path / out_name)
    return tasks, dispatch(tasks, workers, resume=resume, log=log)


def test_parallel_outputs_byte_identical_to_serial(tmp_path):
    tasks_serial, result_serial = run_matrix(tmp_path, "serial", workers=1)
    tasks_par, result_par = run_matrix(tmp_path, "parallel", workers=4)
    assert not result_serial.failed and not result_par.failed
    for ts, tp in zip(tasks_serial, tasks_par):
        assert ts.output_path.read_bytes() == tp.output_path.read_bytes()


def test_resume_reexecutes_only_missing_outputs(tmp_path):
    tasks, first = run_matrix(tmp_path, "out", workers=2)
    assert len(first.completed) == 6
    removed = [tasks[1].output_path, tasks[4].output_path]
    for path in removed:
        path.unlink()
    log = io.StringIO()
    _, second = run_matrix(tmp_path, "out", workers=2, resume=True, log=log)
    assert len(second.completed) == 6
    assert len(second.skipped_ids) == 4
    events = [line.split(",")[1] for line in log.getvalue().splitlines()]
    assert events.count("skip") == 4
    assert events.count("done") == 2
    for path in removed:
        assert path.is_file()


def test_failed_task_is_isolated_and_leaves_no_output(tmp_path):
    good = tmp_path / "good.cascades"
    make_dataset(good, seed=1)
    bad = tmp_path / "bad.cascades"
    bad.write_text("not a cascade file, no separator")
    tasks = build_matrix([good, bad], [2], CONFIG, tmp_path / "out")
    result = dispatch(tasks, 2)
    assert len(result.completed) == 1
    assert len(result.failed) == 1
    failed_task, error = result.failed[0]
    assert failed_task.dataset_path == bad
    assert "line" in error
    assert not failed_task.output_path.exists()
    assert not failed_task.output_path.with_name(failed_task.output_path.name + ".tmp").exists()
    done_task, _, _ = result.completed[0]
    assert done_task.output_path.is_file()


def test_event_log_format(tmp_path):
    log = io.StringIO()
    run_matrix(tmp_path, "out", workers=1, ks=(2,), n_datasets=1, log=log)
    lines = log.getvalue().splitlines()
    assert len(lines) == 2
    for line in lines:
        timestamp, event, task_id, _ = line.split(",", maxsplit=3)
        float(timestamp)
        assert event in {"start", "done", "fail", "skip"}
        assert task_id == "data0.k2"
    assert [line.split(",")[1] for line in lines] == ["start", "done"]


def test_mem_cap_serializes_but_preserves_results(tmp_path):
    tasks, capped = run_matrix(tmp_path, "capped", workers=4)
    # rerun with a cap that admits one task at a time
    tasks2 = build_matrix([t.dataset_path for t in tasks[::2]], [3, 8], CONFIG, tmp_path / "c2")
    result = dispatch(tasks2, 4, mem_cap=1)
    assert not result.failed
    for task in tasks2:
        twin = tmp_path / "capped" / task.output_path.name
        assert task.output_path.read_bytes() == twin.read_bytes()


def test_saturation_reported_per_task(tmp_path):
    tasks, result = run_matrix(tmp_path, "out", workers=1, ks=(2, 500), n_datasets=1)
    by_k = {task.k: saturated for task, _, saturated in result.completed}
    assert by_k[2] is False  # plenty of candidates at k=2
    assert by_k[500] is True  # tiny dataset saturates long before 500


def test_task_id_format(tmp_path):
    task = ExperimentTask(
        dataset_path=tmp_path / "reddit_min10.cascades",
        k=250,
        config=CONFIG,
        output_path=tmp_path / "reddit_min10.k250.edges",
    )
    assert task.task_id == "reddit_min10.k250"
