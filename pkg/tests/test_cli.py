import json

import pytest

from cliquegossip.cli import main
from helpers import ORACLE, fixture_path


def run_cli(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def footer(text):
    return dict(line[2:].split(": ", 1) for line in text.splitlines() if line.startswith("# "))


def test_validate_net13(capsys):
    code, out, _ = run_cli(capsys, "validate", "--input", fixture_path("net13.json"))
    assert code == 0
    assert "valid: true" in out
    edges = [list(map(int, e.split("-"))) for e in
             next(l for l in out.splitlines() if l.startswith("line_graph_edges")).split(": ")[1].split()]
    assert edges == ORACLE["net13_line_edges"]
    assert "line_graph_connected: true" in out


def test_validate_missing_clique(capsys, tmp_path):
    doc = json.loads(fixture_path("net13.json").read_text())
    doc["cliques"] = doc["cliques"][:6]
    p = tmp_path / "no_c7.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "validate", "--input", p)
    assert code == 1
    assert "reason: uncovered" in out and "node 10" in out


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 3,\n "edges": [[1, 2],\n')
    code, _, err = run_cli(capsys, "validate", "--input", p)
    assert code == 2 and "line" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "spectrum", "--input", tmp_path / "nope.json")
    assert code == 2


def test_spectrum_net13(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--input", fixture_path("net13.json"), "--swap", "6")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "re,im,modulus"
    mods = [float(l.split(",")[2]) for l in lines[1:14]]
    assert mods == sorted(mods, reverse=True)
    f = footer(out)
    assert float(f["lambda2"]) == pytest.approx(0.8504, abs=1e-3)
    assert f["swap 6"] == "NON_ADJACENT" and f["spectra_equal"] == "true"
    assert f["convergent"] == "true"


def test_spectrum_swap3_and_explicit_schedule(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--input", fixture_path("net13.json"),
                           "--schedule", "1,2,3,4,5,6,7", "--swap", "2")
    assert code == 0
    assert footer(out)["swap 2"] == "NOT_GUARANTEED"
    code, out, _ = run_cli(capsys, "spectrum", "--input", fixture_path("net13.json"), "--swap", "3")
    assert footer(out)["swap 3"] == "ADJACENT_ACYCLIC"


def test_spectrum_degenerate(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--input", fixture_path("identity.json"))
    assert code == 0
    f = footer(out)
    assert f["lambda2"] == "none" and f["rate"].startswith("undefined")


def test_spectrum_bad_schedule(capsys):
    code, _, err = run_cli(capsys, "spectrum", "--input", fixture_path("net13.json"), "--schedule", "1,9")
    assert code == 1
    code, _, err = run_cli(capsys, "spectrum", "--input", fixture_path("net13.json"),
                           "--schedule", "1,1,2,3,4,5,6", "--swap", "1")
    assert code == 1 and "one-pass" in err


def test_schedule_k18_select(capsys, tmp_path):
    p = tmp_path / "s.json"
    code, out, _ = run_cli(capsys, "schedule", "--n", 18, "--m", 6, "--verify", "--output", p)
    assert code == 0
    doc = json.loads(p.read_text())
    assert doc["steps"] == 6 and doc["cliques"][3] == [1, 2, 7, 8, 13, 14]
    assert "steps: 6" in out and "verify: pass" in out
    # a synthesized schedule feeds back into the analysis commands
    code, out, _ = run_cli(capsys, "simulate", "--input", p, "--x0", "e1", "--mode", "rational",
                           "--steps", 8)
    assert code == 0 and "consensus_time: 6" in out


def test_schedule_k12_lattice(capsys):
    code, out, err = run_cli(capsys, "schedule", "--n", 12, "--factors", "6,2", "--verify")
    assert code == 0
    doc = json.loads(out)
    assert doc["steps"] == 8 and [len(c) for c in doc["cliques"]] == [6, 6, 2, 2, 2, 2, 2, 2]
    assert "verify: pass" in err


def test_schedule_multi_factor(capsys):
    code, out, _ = run_cli(capsys, "schedule", "--n", 8, "--factors", "2,2,2")
    assert code == 0 and json.loads(out)["steps"] == 12


@pytest.mark.parametrize("n, m, reason", [(10, 4, "non-divisible"), (10, 2, "extra-prime")])
def test_schedule_infeasible(capsys, n, m, reason):
    code, _, err = run_cli(capsys, "schedule", "--n", n, "--m", m)
    assert code == 1 and reason in err


def test_simulate_k18_select_rational(capsys, tmp_path):
    p = tmp_path / "t.csv"
    code, out, _ = run_cli(capsys, "simulate", "--input", fixture_path("k18_select.json"), "--x0", "e1",
                           "--mode", "rational", "--steps", 8, "--audit", "--output", p)
    assert code == 0
    assert "consensus_time: 6" in out and "denominator_primes: {2,3}" in out
    rows = p.read_text().splitlines()
    assert rows[0].startswith("t,x_1,") and rows[7].split(",")[1] == "1/18"


def test_simulate_net13_rate(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--input", fixture_path("net13_reordered.json"),
                           "--steps", 700)
    assert code == 0 and "none within 700" in out
    rate = float(next(l for l in out.splitlines() if l.startswith("fitted_rate")).split(": ")[1])
    assert rate == pytest.approx(ORACLE["net13_reordered_lambda2"] ** (1 / 7), rel=5e-3)


def test_simulate_constant(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--input", fixture_path("net13.json"), "--x0", "const",
                           "--steps", 3)
    assert code == 0 and "consensus_time: 0" in out


def test_simulate_bad_x0(capsys):
    code, _, _ = run_cli(capsys, "simulate", "--input", fixture_path("net13.json"), "--x0", "1,2")
    assert code == 1
    code, _, _ = run_cli(capsys, "simulate", "--input", fixture_path("net13.json"), "--x0", "a,b")
    assert code == 2


def test_classes(capsys):
    code, out, _ = run_cli(capsys, "classes", "--input", fixture_path("net13.json"))
    assert code == 0
    assert "greedy_classes: 3" in out and "chi: 3" in out and "bounds: 7/3 <= 3 <= 4" in out
    code, out, _ = run_cli(capsys, "classes", "--input", fixture_path("single_clique.json"))
    assert "greedy_classes: 1" in out
    code, out, _ = run_cli(capsys, "classes", "--input", fixture_path("path20.json"))
    assert code == 0 and "notice:" in out and "chi:" not in out


@pytest.mark.parametrize("args", [
    ["spectrum", "--input", fixture_path("net13.json")],
    ["simulate", "--input", fixture_path("net13.json"), "--steps", 30, "--seed", 7],
    ["simulate", "--input", fixture_path("net13.json"), "--steps", 30, "--mode", "rational"],
    ["schedule", "--n", 9, "--m", 3, "--verify"],
    ["classes", "--input", fixture_path("net13.json")],
])
def test_byte_identical_outputs(tmp_path, capsys, args):
    texts = []
    for k in range(2):
        p = tmp_path / f"o{k}"
        assert main([str(a) for a in args] + ["--output", str(p)]) == 0
        texts.append(p.read_bytes())
    capsys.readouterr()
    assert texts[0] == texts[1]
