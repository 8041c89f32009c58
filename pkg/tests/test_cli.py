import json
import os
import subprocess
import sys

import numpy as np
import pytest

from uncgraph.cli import main, read_config, sample_name
from uncgraph.generators import generate_powerlaw
from uncgraph.graph import load_edge_list, load_uncertain, save_edge_list, total_variance
from uncgraph.rng import RngStream


@pytest.fixture(scope="module")
def graph_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "graph.txt"
    g = generate_powerlaw(400, 2.4, RngStream(5))
    save_edge_list(g, path)
    return str(path)


def _files(d):
    out = {}
    for root, _, names in os.walk(d):
        for name in names:
            if name != "timing.json":
                p = os.path.join(root, name)
                out[os.path.relpath(p, d)] = open(p, "rb").read()
    return out


@pytest.mark.parametrize("argv", [
    ["--scheme", "maxvar", "--np", "300", "--parts", "2", "--diagnostics"],
    ["--scheme", "kobf", "--sigma", "0.1"],
    ["--scheme", "randwalk", "--t", "3"],
    ["--scheme", "randwalk-mod", "--alpha", "0.5", "--method", "matrix"],
    ["--scheme", "randwalk-mod"],
    ["--scheme", "edgeswitch", "--n-switches", "100", "--mix", "0.5"],
    ["--scheme", "kobf", "--parts", "3"],
])
def test_anonymize_schemes(tmp_path, graph_file, argv):
    out = tmp_path / "run"
    assert main(["anonymize", "--in", graph_file, "--out", str(out), "--seed", "3"] + argv) == 0
    man = json.loads((out / "manifest.json").read_text())
    ug = load_uncertain(out / "uncertain.txt", n=man["input"]["n"])
    assert man["total_variance"] == pytest.approx(total_variance(ug))
    assert man["seed"] == 3 and man["scheme"] == argv[1]
    assert "wall_time_s" in json.loads((out / "timing.json").read_text())
    if argv[1] == "maxvar":
        assert man["total_variance"] <= man["tv_bound"] + 1e-9
        assert (out / "diagnostics.csv").exists()


def test_anonymize_byte_identical(tmp_path, graph_file):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["anonymize", "--in", graph_file, "--scheme", "maxvar", "--parts", "2", "--seed", "9"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    fa, fb = _files(a), _files(b)
    fa["manifest.json"] = fa["manifest.json"].replace(str(a).encode(), b"OUT")
    fb["manifest.json"] = fb["manifest.json"].replace(str(b).encode(), b"OUT")
    assert fa == fb


def test_seed_required(tmp_path, graph_file, capsys):
    code = main(["anonymize", "--in", graph_file, "--out", str(tmp_path), "--scheme", "kobf"])
    assert code == 2
    assert "--seed is required" in capsys.readouterr().err
    for cmd in (["sample", "--in", graph_file, "--out", str(tmp_path)],
                ["partition-export", "--in", graph_file, "--out", str(tmp_path / "p"), "--parts", "2"]):
        assert main(cmd) == 2


def test_user_errors(tmp_path, graph_file, capsys):
    base = ["anonymize", "--in", graph_file, "--out", str(tmp_path), "--seed", "1"]
    assert main(base + ["--scheme", "nope"]) == 2
    assert main(base + ["--scheme", "edgeswitch"]) == 2
    assert main(base + ["--scheme", "randwalk-mod", "--alpha", "0"]) == 2
    assert main(["anonymize", "--in", str(tmp_path / "missing.txt"), "--out", str(tmp_path),
                 "--seed", "1", "--scheme", "kobf"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 x\n")
    assert main(["anonymize", "--in", str(bad), "--out", str(tmp_path), "--seed", "1",
                 "--scheme", "kobf"]) == 2
    err = capsys.readouterr().err
    assert "Traceback" not in err and err.count("uncgraph: error:") == 5


def test_config_file_and_override(tmp_path, graph_file):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# maxvar run\nscheme = kobf\nsigma = 0.2\nseed = 4\n")
    assert read_config(cfg) == ["--scheme", "kobf", "--sigma", "0.2", "--seed", "4"]
    out = tmp_path / "o"
    assert main(["anonymize", "--config", str(cfg), "--in", graph_file, "--out", str(out),
                 "--sigma", "0.05"]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["config"]["sigma"] == 0.05 and man["config"]["seed"] == 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("sigma 0.1\n")
    assert main(["anonymize", "--config", str(bad), "--in", graph_file, "--out", str(out)]) == 2
    assert main(["anonymize", "--config", str(tmp_path / "none.cfg"), "--in", graph_file,
                 "--out", str(out)]) == 2


def test_sample_and_evaluate(tmp_path, graph_file):
    run = tmp_path / "run"
    assert main(["anonymize", "--in", graph_file, "--out", str(run), "--scheme", "kobf",
                 "--sigma", "0.1", "--seed", "2"]) == 0
    samples = tmp_path / "s"
    assert main(["sample", "--in", str(run / "uncertain.txt"), "--out", str(samples),
                 "--n-samples", "3", "--seed", "2"]) == 0
    names = sorted(n for n in os.listdir(samples) if n.endswith(".txt"))
    assert names == ["sample_000_seed2.txt", "sample_001_seed2.txt", "sample_002_seed2.txt"]
    assert names == [sample_name(i, 2) for i in range(3)]
    again = tmp_path / "s2"
    main(["sample", "--in", str(run / "uncertain.txt"), "--out", str(again),
          "--n-samples", "3", "--seed", "2"])
    assert _files(samples)[names[0]] == _files(again)[names[0]]

    ev = tmp_path / "ev"
    assert main(["evaluate", "--true", graph_file, "--uncertain", str(run / "uncertain.txt"),
                 "--samples", str(samples), "--out", str(ev), "--n-samples", "2",
                 "--ks", "5,10", "--n-sources", "20", "--seed", "1"]) == 0
    lines = (ev / "report.csv").read_text().splitlines()
    assert lines[0].startswith("scheme,params,n_samples,H1,H2_open,S_NE")
    assert lines[0].endswith("eps_k5,eps_k10,tradeoff")
    assert len(lines) == 3
    assert lines[1].startswith("kobf,sigma=0.1,2,")
    assert (ev / "report_long.csv").exists()
    ev2 = tmp_path / "ev2"
    main(["evaluate", "--true", graph_file, "--uncertain", str(run / "uncertain.txt"),
          "--samples", str(samples), "--out", str(ev2), "--n-samples", "2",
          "--ks", "5,10", "--n-sources", "20", "--seed", "1"])
    assert (ev / "report.csv").read_bytes() == (ev2 / "report.csv").read_bytes()
    assert main(["evaluate", "--true", graph_file, "--out", str(ev), "--seed", "1"]) == 2


def test_certain_input_gives_identical_samples(tmp_path):
    ug = tmp_path / "u.txt"
    ug.write_text("0 1 1.0\n1 2 1.0\n2 3 1\n")
    out = tmp_path / "s"
    assert main(["sample", "--in", str(ug), "--out", str(out), "--n-samples", "4",
                 "--seed", "8"]) == 0
    contents = {(out / sample_name(i, 8)).read_bytes() for i in range(4)}
    assert len(contents) == 1


def test_sample_keeps_isolated_nodes(tmp_path):
    ug = tmp_path / "u.txt"
    ug.write_text("# n=6\n0 1 0.5\n")
    out = tmp_path / "s"
    main(["sample", "--in", str(ug), "--out", str(out), "--n-samples", "2", "--seed", "0"])
    g = load_edge_list(out / sample_name(0, 0), compact=False, simple=False)
    assert g.n == 6


def test_partition_export(tmp_path, graph_file):
    out = tmp_path / "g.part"
    assert main(["partition-export", "--in", graph_file, "--out", str(out), "--parts", "4",
                 "--seed", "1"]) == 0
    parts = np.loadtxt(out, dtype=int)
    g = load_edge_list(graph_file)
    assert len(parts) == g.n and set(parts.tolist()) == {0, 1, 2, 3}
    run = tmp_path / "r"
    assert main(["anonymize", "--in", graph_file, "--out", str(run), "--scheme", "maxvar",
                 "--parts", "4", "--partition", str(out), "--seed", "1"]) == 0
    man = json.loads((run / "manifest.json").read_text())
    cut = parts[g.edges[:, 0]] != parts[g.edges[:, 1]]
    assert man["cut_edges"] == int(cut.sum())
    assert main(["partition-export", "--in", graph_file, "--out", str(out), "--parts",
                 str(10**6), "--seed", "1"]) == 2


def test_verify_command(capsys):
    assert main(["verify", "--level", "fast"]) == 0
    assert "all checks passed" in capsys.readouterr().out
    assert main(["verify", "--level", "fast", "--inject-alpha", "0.6",
                 "--check", "randwalk-mod-expected-degrees"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "uncgraph.cli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
    res = subprocess.run([sys.executable, "-m", "uncgraph.cli", "anonymize", "--help"],
                         capture_output=True, text=True)
    assert "--scheme" in res.stdout
