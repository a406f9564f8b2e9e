import json
import subprocess
import sys

import pytest

from banditlab import cli
from banditlab.environment import meta_path


def run(*args):
    return cli.main([str(a) for a in args])


def test_run_writes_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert run("run", "--algo", "elimination", "--beta", 1, "--horizon", 3000, "--reps", 2, "--seed", 4, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "rep,round,cum_regret,episodes,V,L,V_R,L_R"
    assert len(lines) == 1 + 2 * 3


def test_config_file_and_override(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"algo": "ssucb", "beta": 1.0, "horizon": 2000, "reps": 1, "out": str(tmp_path / "f.csv")}))
    assert run("run", "--config", conf) == 0
    assert (tmp_path / "f.csv").exists()
    assert run("run", "--config", conf, "--reps", 3, "--out", tmp_path / "g.csv") == 0
    assert len((tmp_path / "g.csv").read_text().splitlines()) == 1 + 3 * 2


@pytest.mark.parametrize(
    "args",
    [
        ["run", "--algo", "ssucb", "--beta", "1", "--horizon", "1", "--out", "x.csv"],
        ["run", "--algo", "ssucb", "--beta", "-1", "--horizon", "100", "--out", "x.csv"],
        ["run", "--algo", "ssucb", "--beta", "1", "--horizon", "100"],
        ["run", "--algo", "ssucb", "--beta", "1", "--horizon", "100", "--adversary", "wobbly", "--out", "x.csv"],
    ],
)
def test_config_errors_exit_2(tmp_cwd, args, capsys):
    assert cli.main(args) == 2
    assert "error" in capsys.readouterr().err


def test_bad_config_json(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text("{not json")
    assert run("run", "--config", conf) == 2
    conf.write_text(json.dumps({"algo": "ssucb", "beta": 1, "horizon": 100, "extra": 1, "out": "x"}))
    assert run("run", "--config", conf) == 2


def test_io_errors_exit_3(tmp_path):
    assert run("run", "--algo", "ssucb", "--beta", 1, "--horizon", 100, "--out", tmp_path / "no" / "x.csv") == 3
    assert run("run", "--config", tmp_path / "missing.json") == 3
    assert run("analyze", "--trace", tmp_path / "missing.csv", "--out", tmp_path / "o.json") == 3
    assert run("run", "--algo", "ssucb", "--beta", 1, "--horizon", 100, "--adversary", f"abrupt:{tmp_path / 'none.json'}",
               "--out", tmp_path / "x.csv") == 3


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--algo", "nope"])
    assert exc.value.code == 2


def test_trace_and_analyze(tmp_path):
    trace = tmp_path / "t.csv"
    out = tmp_path / "r.csv"
    assert run("run", "--algo", "blackbox-ucb", "--beta", 1, "--horizon", 600, "--adversary", "rotting-1-over-t",
               "--out", out, "--trace-out", trace) == 0
    assert meta_path(trace).exists()
    rep = tmp_path / "shifts.json"
    assert run("analyze", "--trace", trace, "--detect-shifts", "--beta", 1, "--kappa-inv", 1, "--out", rep) == 0
    data = json.loads(rep.read_text())
    assert data["rounds"] == 600
    assert sum(data["phase_lengths"]) == 600
    assert {"taus", "witnesses"} <= set(data)
    rows = out.read_text().splitlines()
    assert float(rows[-1].split(",")[2]) == pytest.approx(data["cum_regret"])
    assert run("analyze", "--trace", trace, "--detect-shifts", "--budget-rule", "global", "--out", rep) == 0
    meta_path(trace).unlink()
    assert run("analyze", "--trace", trace, "--out", rep) == 0
    assert run("analyze", "--trace", trace, "--detect-shifts", "--out", rep) == 2


def test_plot(tmp_path):
    paths = []
    for algo in ("blackbox-ucb", "elimination", "ssucb"):
        p = tmp_path / f"{algo}.csv"
        assert run("run", "--algo", algo, "--beta", 1, "--horizon", 256, "--reps", 2, "--checkpoint-start", 3, "--out", p) == 0
        paths.append(p)
    svg = tmp_path / "p.svg"
    assert run("plot", "--in", *paths, "--out", svg, "--loglog") == 0
    text = svg.read_text()
    for algo in ("blackbox-ucb", "elimination", "ssucb"):
        assert f'id="series-{algo}"' in text
    assert run("plot", "--in", f"mine={paths[0]}", "--out", svg) == 0
    assert 'id="series-mine"' in svg.read_text()
    assert run("plot", "--in", tmp_path / "nope.csv", "--out", svg) == 3


def test_fig1_small(tmp_path):
    d = tmp_path / "fig"
    assert run("fig1", "--beta", 1.0, "--horizon", 2000, "--reps", 2, "--out-dir", d) == 0
    names = sorted(p.name for p in d.iterdir())
    assert names == ["blackbox-ucb.csv", "elimination.csv", "fig1_beta1.0.svg", "ssucb.csv", "summary.json"]
    summary = json.loads((d / "summary.json").read_text())
    assert set(summary) == {"blackbox-ucb", "elimination", "ssucb"}


def test_console_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "banditlab.cli", "run", "--algo", "ssucb", "--beta", "1", "--horizon", "64", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().count("\n") == 2
