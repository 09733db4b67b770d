import json
import subprocess
import sys

import pytest

from normality_lab.automata import Dfa, rotator_dfa, toggle_dfa
from normality_lab.cli import main


@pytest.fixture
def dfa_files(tmp_path):
    paths = {}
    for name, A in (("toggle", toggle_dfa()), ("rotator", rotator_dfa(3))):
        p = tmp_path / f"{name}.json"
        p.write_text(A.to_json())
        paths[name] = str(p)
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": 2, "start": 0, "accepting": [0], "delta": [[0, 1]]}')
    paths["bad"] = str(bad)
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    paths["junk"] = str(junk)
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_select_periodic(capsys, dfa_files):
    # toggle picks odd positions of 010101, all of them 0
    code, out, _ = run(capsys, "select", "--dfa", dfa_files["toggle"], "--source", "periodic:01", "--n", 6)
    assert (code, out) == (0, "000\n")
    code, out, _ = run(capsys, "select", "--dfa", dfa_files["toggle"], "--source", "periodic:01",
                       "--n", 6, "--positions")
    assert out.splitlines() == ["000", "1 3 5"]


def test_select_length_law(capsys, dfa_files):
    code, out, _ = run(capsys, "select", "--dfa", dfa_files["toggle"], "--source", "champernowne", "--n", 1048576)
    assert code == 0 and len(out.strip()) == 524288


@pytest.mark.parametrize("which", ["bad", "junk"])
def test_select_bad_dfa(capsys, dfa_files, which):
    code, _, err = run(capsys, "select", "--dfa", dfa_files[which], "--source", "champernowne", "--n", 5)
    assert code == 2 and err


def test_select_missing_file_is_io(capsys, tmp_path):
    code, _, _ = run(capsys, "select", "--dfa", tmp_path / "none.json", "--source", "champernowne", "--n", 5)
    assert code == 3


def test_select_exhausted_source_is_io(capsys, dfa_files, tmp_path):
    f = tmp_path / "short.txt"
    f.write_text("0101")
    code, _, err = run(capsys, "select", "--dfa", dfa_files["toggle"], "--source", f"file:{f}", "--n", 10)
    assert code == 3 and "exhausted" in err


def test_verify_lemma3_default_catalog(capsys):
    code, out, _ = run(capsys, "verify", "lemma3", "--catalog", "default")
    assert code == 0
    assert "violations" in out


def test_verify_mainclaim_toggle(capsys, dfa_files):
    code, out, _ = run(capsys, "verify", "mainclaim", "--dfa", dfa_files["toggle"],
                       "--p", "1/2", "--eps", "1/4", "--n", "4..16")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0].startswith("n,mu_D")
    from fractions import Fraction
    col = [Fraction(r.split(",")[1]) for r in rows[1:]]
    assert len(col) == 13 and col[-1] > col[0]


def test_verify_lemma1_eps_too_large(capsys, dfa_files):
    code, _, err = run(capsys, "verify", "lemma1", "--eps", "3/4", "--dfa", dfa_files["toggle"])
    assert code == 2 and "c=1/2" in err


def test_verify_cap(capsys, dfa_files):
    code, _, _ = run(capsys, "verify", "mainclaim", "--dfa", dfa_files["toggle"], "--eps", "1/4", "--n", "30")
    assert code == 2


def test_verify_decimal_rejected(capsys, dfa_files):
    code, _, _ = run(capsys, "verify", "lemma1", "--eps", "0.25", "--dfa", dfa_files["toggle"])
    assert code == 2


def test_verify_lemma2_and_partition(capsys, dfa_files):
    code, out, _ = run(capsys, "verify", "lemma2", "--strategy", f"dfa:{dfa_files['toggle']}",
                       "--p", "1/2", "--b", "1/4", "--eps", "1/4", "--n", "8,12,16")
    assert code == 0 and len(out.strip().splitlines()) == 4
    code, out, _ = run(capsys, "verify", "lemma2", "--strategy", "suffix:1", "--p", "1/2",
                       "--b", "1/4", "--eps", "1/4", "--n", "6..10:2")
    assert code in (0, 1)
    code, out, _ = run(capsys, "verify", "partition", "--dfa", dfa_files["rotator"], "--p", "1/3",
                       "--b", "1/4", "--eps", "1/8", "--n", "10")
    assert code == 0


def test_verify_lemma3_explicit_f(capsys, dfa_files):
    code, out, _ = run(capsys, "verify", "lemma3", "--strategy", f"dfa:{dfa_files['toggle']}",
                       "--F", "11", "--p", "1/2", "--n", "4", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["rows"][0]["mu_M"] == "1/4"
    for flags in (["--F", "11", "--F", "0"], ["--F", "11,0"]):
        code, out, _ = run(capsys, "verify", "lemma3", "--strategy", f"dfa:{dfa_files['toggle']}",
                           *flags, "--p", "1/2", "--n", "4")
        assert code == 0 and out.splitlines()[1].startswith("4,1/4,3/4,")


def test_verify_verdict_failure_exit_1(capsys, dfa_files):
    # toggle, b=1/4, eps=1/8: mu(D_8) > mu(D_16), so the increasing verdict fails
    code, _, _ = run(capsys, "verify", "mainclaim", "--dfa", dfa_files["toggle"], "--p", "1/2",
                     "--b", "1/4", "--eps", "1/8", "--n", "8,16")
    assert code == 1


def test_analyze_block(capsys):
    code, out, _ = run(capsys, "analyze", "--notion", "block", "--target", "11",
                       "--source", "champernowne", "--N", "2^18")
    assert code == 0
    last = out.strip().splitlines()[-1].split(",")
    assert last[0] == "262144" and float(last[3]) < 0.05


def test_analyze_postnikov_periodic_fails(capsys):
    code, out, _ = run(capsys, "analyze", "--notion", "postnikov", "--w", "10", "--source", "periodic:01")
    assert code == 1
    assert all(r.split(",")[1] == "0.0" for r in out.strip().splitlines()[1:])


def test_analyze_usage_errors(capsys):
    assert run(capsys, "analyze", "--notion", "copeland", "--r", 3, "--n", 2)[0] == 2
    assert run(capsys, "analyze", "--notion", "bogus")[0] == 2
    assert run(capsys, "analyze", "--notion", "block", "--source", "nonsense:1")[0] == 2


def test_markov_and_compose(capsys, dfa_files):
    code, out, _ = run(capsys, "markov", "--dfa", dfa_files["toggle"], "--p", "1/3")
    data = json.loads(out)
    assert code == 0 and data["period"] == 2 and data["stationary"] == ["1/2", "1/2"]
    code, out, _ = run(capsys, "compose", dfa_files["toggle"], dfa_files["toggle"])
    C = Dfa.from_json(out)
    assert code == 0 and C.states == 4


def test_generate(capsys):
    assert run(capsys, "generate", "--source", "champernowne", "--n", 10)[1] == "0110111001\n"
    assert run(capsys, "generate", "--source", "random:0/1:3", "--n", 10)[0] == 2


def test_no_subcommand_is_usage_error(capsys):
    assert run(capsys)[0] == 2


@pytest.mark.parametrize("argv", [
    ["generate", "--source", "random:1/3:7", "--n", "5000"],
    ["markov", "--simulate", "20000", "--p", "1/3"],
    ["analyze", "--notion", "copeland", "--r", "1", "--n", "3", "--N", "2^12", "--format", "json"],
])
def test_outputs_byte_identical(tmp_path, dfa_files, argv):
    if argv[0] == "markov":
        argv = argv + ["--dfa", dfa_files["rotator"]]
    outs, codes = [], []
    for i in range(2):
        target = tmp_path / f"out{i}"
        codes.append(main(argv + ["--seed", "11", "--output", str(target)]))
        outs.append(target.read_bytes())
    assert outs[0] == outs[1] and outs[0]
    assert codes[0] == codes[1] and codes[0] in (0, 1)
    assert not list(tmp_path.glob(".tmp-*"))


def test_entry_point_module():
    r = subprocess.run([sys.executable, "-m", "normality_lab", "generate", "--source", "periodic:10", "--n", "4"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "1010\n"
