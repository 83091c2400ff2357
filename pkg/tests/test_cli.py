"""End-to-end CLI runs, in process via main()."""
import pytest

from diffnet.cli import main
from diffnet.cascades import read_cascades
from diffnet.inference import read_inferred
from diffnet.ingest import write_submission_log, SubmissionRecord


def test_full_synthetic_pipeline(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    casc = tmp_path / "c.txt"
    net = tmp_path / "run.k24.edges"

    assert main(["gen-graph", "--power", "5", "--edges", "48", "--seed", "7",
                 "--out", str(graph)]) == 0
    assert main(["simulate", "--graph", str(graph), "--count", "64", "--beta", "0.5",
                 "--alpha-min", "0.1", "--alpha-max", "10", "--coverage", "0.85",
                 "--seed", "3", "--out", str(casc)]) == 0
    assert main(["infer", "--cascades", str(casc), "--k", "24", "--out", str(net)]) == 0

    loaded = read_cascades(casc)
    assert len(loaded.cascades) == 64
    network = read_inferred(net)
    assert len(network.selections) == 24

    dot = tmp_path / "net.dot"
    degrees = tmp_path / "deg.csv"
    assert main(["eval", "--inferred", str(net), "--truth", str(graph),
                 "--format", "dot", "--out", str(dot),
                 "--degrees-out", str(degrees)]) == 0
    out = capsys.readouterr().out
    assert "precision=" in out and "recall=" in out
    assert dot.read_text().startswith("digraph G {")
    assert degrees.read_text().startswith("node,in_degree,out_degree\n")

    curve_csv = tmp_path / "curve.csv"
    curve_png = tmp_path / "curve.png"
    assert main(["report", "--runs", str(net),
                 "--curve-out", str(curve_csv), "--plot", str(curve_png)]) == 0
    assert curve_csv.read_text() == "dataset,k,edges_found\nrun,24,24\n"
    assert curve_png.stat().st_size > 0


def test_custom_matrix_flag(tmp_path):
    graph = tmp_path / "g.txt"
    assert main(["gen-graph", "--power", "3", "--edges", "10", "--seed", "1",
                 "--matrix", "0.8,0.4,0.4,0.2", "--out", str(graph)]) == 0
    assert graph.read_text().startswith("nodes:8\n")


def test_baseline_diff_export(tmp_path):
    graph = tmp_path / "g.txt"
    casc = tmp_path / "c.txt"
    main(["gen-graph", "--power", "4", "--edges", "24", "--seed", "2", "--out", str(graph)])
    main(["simulate", "--graph", str(graph), "--count", "48", "--seed", "5",
          "--out", str(casc)])
    small = tmp_path / "small.edges"
    big = tmp_path / "big.edges"
    main(["infer", "--cascades", str(casc), "--k", "4", "--out", str(small)])
    main(["infer", "--cascades", str(casc), "--k", "12", "--out", str(big)])
    diff = tmp_path / "diff.dot"
    assert main(["eval", "--inferred", str(small), "--baseline", str(big),
                 "--format", "dot", "--out", str(diff)]) == 0
    text = diff.read_text()
    assert text.count("color=red") == 8  # greedy selections nest: 12 - 4 missing
    assert text.count("color=black") == 4


def test_ingest_cli(tmp_path, capsys):
    log = tmp_path / "log.csv"
    records = []
    for image in range(6):
        for j in range(2 + image * 2):
            records.append(SubmissionRecord(
                contagion_id=f"img{image}",
                node_id=None if (image == 0 and j == 0) else f"user{j}",
                community=f"sub{j % 3}",
                timestamp=1000 + j * 60,
                votes=j,
            ))
    write_submission_log(records, log)

    stats_csv = tmp_path / "stats.csv"
    stats_png = tmp_path / "stats.png"
    cascades_out = tmp_path / "reddit.cascades"
    assert main(["ingest", "--in", str(log), "--min-length", "4",
                 "--stats-lengths", "2-8", "--stats-out", str(stats_csv),
                 "--stats-plot", str(stats_png), "--cascades-out", str(cascades_out)]) == 0
    out = capsys.readouterr().out
    assert "dropped 1" in out
    lines = stats_csv.read_text().splitlines()
    assert lines[0] == "min_length,avg_length,contagions,transmissions"
    assert len(lines) == 8
    assert stats_png.stat().st_size > 0
    loaded = read_cascades(cascades_out)
    assert all(len(c.events) >= 2 for c in loaded.cascades)


def test_sweep_cli(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    main(["gen-graph", "--power", "4", "--edges", "20", "--seed", "4", "--out", str(graph)])
    for i in range(3):
        main(["simulate", "--graph", str(graph), "--count", "16", "--seed", str(10 + i),
              "--out", str(tmp_path / f"ds{i}.cascades")])
    out_dir = tmp_path / "runs"
    assert main(["sweep", "--datasets", str(tmp_path / "ds*.cascades"),
                 "--ks", "5,50", "--workers", "2", "--out-dir", str(out_dir)]) == 0
    outputs = sorted(p.name for p in out_dir.glob("*.edges"))
    assert outputs == [f"ds{i}.k{k}.edges" for i in range(3) for k in (5, 50)]
    assert (out_dir / "sweep.log").is_file()
    assert "completed=6" in capsys.readouterr().out

    # resume skips everything
    assert main(["sweep", "--datasets", str(tmp_path / "ds*.cascades"),
                 "--ks", "5,50", "--workers", "2", "--resume",
                 "--out-dir", str(out_dir)]) == 0
    assert "skipped=6" in capsys.readouterr().out


def test_cli_reports_errors_with_exit_code(tmp_path, capsys):
    assert main(["infer", "--cascades", str(tmp_path / "missing.txt"),
                 "--k", "5", "--out", str(tmp_path / "x.edges")]) == 2
    assert "error:" in capsys.readouterr().err

    bad = tmp_path / "bad.cascades"
    bad.write_text("0,a\n\nc1;0,2.0;0,1.0\n")
    assert main(["infer", "--cascades", str(bad), "--k", "5",
                 "--out", str(tmp_path / "x.edges")]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err
