import json
import subprocess
import sys
from pathlib import Path

import pytest

from alphaproj.cli import RunConfig, main
from alphaproj.errors import ParseError

FIXTURES = Path(__file__).parent / "fixtures"


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def two_point(tmp_path):
    p = write(tmp_path, "p.json", {"points": ["a", "b"], "p": [0.75, 0.25]})
    u = write(tmp_path, "u.json", {"points": ["a", "b"], "p": [0.5, 0.5]})
    return p, u


def test_entropy(two_point, capsys):
    code, rep = run(["entropy", "--input", two_point[0], "--alpha", 2], capsys)
    assert code == 0
    assert rep["H_alpha"] == pytest.approx(0.4700036292, abs=1e-10)
    assert rep["support_size"] == 2


def test_entropy_csv(tmp_path, capsys):
    path = write(tmp_path, "p.csv", "point,mu_weight,p\na,1,0.75\nb,1,0.25\n")
    code, rep = run(["entropy", "--input", path, "--alpha", 2, "--format", "csv"], capsys)
    assert code == 0 and rep["H_alpha"] == pytest.approx(0.4700036292, abs=1e-10)


def test_divergence(two_point, capsys):
    code, rep = run(["divergence", "--input", two_point[0], "--ref", two_point[1], "--alpha", 2], capsys)
    assert code == 0
    assert rep["value"] == pytest.approx(0.2231435513, abs=1e-10)
    assert rep["path_delta"] <= 1e-12


def test_divergence_disjoint_is_infinite(tmp_path, capsys):
    a = write(tmp_path, "a.json", {"points": ["a", "b"], "p": [1, 0]})
    b = write(tmp_path, "b.json", {"points": ["a", "b"], "p": [0, 1]})
    code, rep = run(["divergence", "--input", a, "--ref", b, "--alpha", 0.5], capsys)
    assert code == 0 and rep["value"] == "+inf"


def test_divergence_consistency_exit(two_point, capsys):
    code, _ = run(
        ["divergence", "--input", two_point[0], "--ref", two_point[1], "--alpha", 2, "--tol", "path_agreement=-1"],
        capsys,
    )
    assert code == 3


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_project_matches_fixture(alpha, capsys):
    code, rep = run(
        [
            "project",
            "--ref", FIXTURES / "project_3pt_r.json",
            "--constraints", FIXTURES / "project_3pt_constraints.json",
            "--alpha", alpha,
        ],
        capsys,
    )
    assert code == 0
    oracle = json.loads((FIXTURES / "project_3pt_oracle.json").read_text())
    case = next(c for c in oracle["cases"] if c["alpha"] == alpha)
    assert 0.5 * sum(abs(x - y) for x, y in zip(rep["q"], case["q"])) <= 1e-4
    assert rep["certificate_ok"] is True


def test_project_infeasible(tmp_path, capsys):
    c = write(tmp_path, "c.json", {"equalities": [{"statistic": [1, 2, 3], "target": 3.5}]})
    code, _ = run(["project", "--ref", FIXTURES / "project_3pt_r.json", "--constraints", c, "--alpha", 2], capsys)
    assert code == 4


def test_maxent(tmp_path, capsys):
    spec = write(tmp_path, "s.json", {"n": 1, "alpha": 2, "C": [[1]]})
    dens = tmp_path / "g.json"
    code, rep = run(["maxent", "--input", spec, "--density", dens], capsys)
    assert code == 0
    assert rep["Z"] == pytest.approx(2.98142397, abs=1e-5)
    assert rep["support_half_widths"][0] == pytest.approx(2.2360679775, abs=1e-10)
    assert json.loads(dens.read_text())["p"]


@pytest.mark.parametrize(
    "spec, code",
    [
        ({"n": 1, "alpha": 0.3, "C": [[1]]}, 5),
        ({"n": 1, "alpha": 2, "C": [[-1]]}, 5),
        ({"n": 1, "alpha": 2, "C": [[1, 0]]}, 2),
        ({"n": 1, "alpha": 2, "C": [[1]], "x": 0}, 2),
    ],
)
def test_maxent_errors(tmp_path, capsys, spec, code):
    path = write(tmp_path, "s.json", spec)
    assert run(["maxent", "--input", path], capsys)[0] == code


@pytest.mark.parametrize(
    "argv, code",
    [
        (["entropy", "--alpha", "2"], 2),
        (["entropy", "--input", "{p}", "--alpha", "1"], 5),
        (["entropy", "--input", "{p}", "--alpha", "-1"], 5),
        (["entropy", "--input", "{p}"], 2),
        (["entropy", "--input", "{bad}", "--alpha", "2"], 2),
        (["entropy", "--input", "{nan}", "--alpha", "2"], 2),
        (["entropy", "--input", "{p}", "--alpha", "2", "--tol", "bogus=1"], 2),
        (["entropy", "--input", "{p}", "--alpha", "2", "--seed", "-1"], 2),
        (["nope"], 2),
        (["verify", "unknown"], 2),
    ],
)
def test_exit_codes(tmp_path, capsys, argv, code):
    files = {
        "p": write(tmp_path, "p.json", {"points": ["a", "b"], "p": [0.75, 0.25]}),
        "bad": write(tmp_path, "bad.json", {"points": ["a", "b"], "p": [1.5, -0.5]}),
        "nan": write(tmp_path, "nan.json", '{"points": ["a", "b"], "p": [NaN, 1]}'),
    }
    argv = [a.format(**files) for a in argv]
    assert main(argv) == code
    capsys.readouterr()


def test_config_file(tmp_path, two_point, capsys):
    cfg = write(tmp_path, "cfg.json", {"alpha": 2, "seed": 3, "output_path": str(tmp_path / "out.json")})
    assert main(["entropy", "--input", two_point[0], "--config", cfg]) == 0
    rep = json.loads((tmp_path / "out.json").read_text())
    assert rep["alpha"] == 2.0
    bad = write(tmp_path, "bad.json", {"alpha": 2, "colour": "red"})
    assert main(["entropy", "--input", two_point[0], "--config", bad]) == 2
    capsys.readouterr()


def test_run_config_strict():
    with pytest.raises(ParseError):
        RunConfig.from_json('{"seed": -1}')
    with pytest.raises(ParseError):
        RunConfig.from_json('{"tolerances": {"x": NaN}}')
    with pytest.raises(ParseError):
        RunConfig.from_json('{"format": "xml"}')
    assert RunConfig.from_json('{"seed": 5}').seed == 5


def test_verify_is_deterministic_across_threads(tmp_path, monkeypatch):
    outs = []
    for threads in ("0", "1", "3"):
        monkeypatch.setenv("APT_NUM_THREADS", threads)
        out = tmp_path / f"v{threads}.json"
        code = main(["verify", "parallelogram", "--samples", "40", "--seed", "11", "--output", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    rep = json.loads(outs[0])
    assert rep["passed"] and rep["seed"] == 11


def test_verify_reports_violations(tmp_path):
    out = tmp_path / "v.json"
    code = main(["verify", "parallelogram", "--samples", "5", "--output", str(out), "--tol", "gap_sign=1"])
    assert code == 3
    rep = json.loads(out.read_text())
    assert rep["violations"] > 0
    fail = rep["checks"]["gap_sign"]["failing"][0]
    assert set(fail) >= {"seed", "index", "alpha", "value"}


def test_entry_point_runs_as_module(two_point):
    proc = subprocess.run(
        [sys.executable, "-m", "alphaproj", "entropy", "--input", two_point[0], "--alpha", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["H_alpha"] == pytest.approx(0.470003629246, abs=1e-12)
