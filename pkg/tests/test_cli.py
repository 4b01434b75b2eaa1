import csv
import io
import json
import subprocess
import sys

import pytest

from decouplab.cli import main
from decouplab.suite import (
    EXIT_CAP,
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    ConfigError,
    default_config_text,
    exit_status,
    load_config,
    run_suite,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSubcommands:
    def test_identities(self, capsys):
        code, out, _ = run(capsys, "identities", "--instances", "50")
        assert code == 0 and json.loads(out)["status"] == "pass"

    def test_lemma1_csv(self, capsys):
        code, out, _ = run(capsys, "lemma1", "--dist", "rademacher", "--t-grid", "0,1,2", "--out", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 3

    def test_falsifier(self, capsys):
        code, out, _ = run(capsys, "falsify-symmetrization")
        assert code == 0 and json.loads(out)["payload"]["all_violated"]

    def test_tails_csv_header(self, capsys):
        code, out, _ = run(capsys, "tails", "--statistic", "decoupled", "--t-grid", "1,2", "--out", "csv")
        assert code == 0 and out.splitlines()[0] == "t,p,ci_lo,ci_hi"

    def test_tails_mc(self, capsys):
        code, out, _ = run(capsys, "tails", "--engine", "mc", "--replicates", "1000", "--t-grid", "1")
        assert code == 0 and json.loads(out)["payload"]["mode"] == "estimated"

    def test_find_constant_antisymmetric(self, capsys):
        code, out, _ = run(capsys, "find-constant", "--direction", "2", "--kernel", "antisymmetric")
        assert code == EXIT_FAIL and "hypothesis" in json.loads(out)["detail"]

    def test_cap_refusal(self, capsys):
        code, out, _ = run(capsys, "tails", "--n", "8", "--cap", "100")
        assert code == EXIT_CAP and json.loads(out)["status"] == "refused"

    def test_bad_usage(self, capsys):
        code, _, err = run(capsys, "tails", "--engine", "quantum")
        assert code == EXIT_USAGE and "invalid choice" in err

    def test_graph_demo_atoms(self, capsys):
        code, out, _ = run(capsys, "graph-demo", "--atoms", "[[0],[1]]", "--points", "3")
        assert code == 0 and json.loads(out)["payload"]["holds"]

    def test_decompose_all(self, capsys):
        code, _, _ = run(capsys, "decompose", "--which", "all", "--n", "2")
        assert code == 0


class TestSuite:
    def test_empty(self, tmp_path):
        res = run_suite(load_config('{"checks": []}'), tmp_path / "b")
        assert res.exit_code == EXIT_PASS and res.results == []

    def test_antisymmetric_reverse_fails(self):
        cfg = load_config('{"kernel": "antisymmetric", "checks": [{"check": "find_constant", "direction": 2}]}')
        res = run_suite(cfg)
        assert res.exit_code == EXIT_FAIL and "hypothesis violation" in res.results[0].detail

    def test_config_error_has_line(self):
        text = '{\n  "checks": [\n    "identities",\n    {"check": "nonsense"}\n  ]\n}'
        with pytest.raises(ConfigError) as info:
            load_config(text)
        assert info.value.line == 4 and "checks[1]" in str(info.value)

    def test_bad_json_has_line(self):
        with pytest.raises(ConfigError) as info:
            load_config('{\n "checks": [\n}')
        assert info.value.line is not None

    @pytest.mark.parametrize("bad", ['{"checks": [], "replicates": -5}', '{"checks": [], "engine": "magic"}',
                                     '{"checks": [], "grids": {"C": [0.5]}}', '{"checks": [], "confidence": 2}'])
    def test_invalid_settings(self, bad):
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_refusal_beats_failure(self):
        assert exit_status(["pass", "fail", "refused"]) == EXIT_CAP
        assert exit_status(["pass", "fail"]) == EXIT_FAIL
        assert exit_status(["pass", "inconclusive"]) == EXIT_FAIL
        assert exit_status([]) == EXIT_PASS

    def test_bundle_layout(self, tmp_path):
        cfg = load_config('{"checks": ["falsify_symmetrization", {"check": "tails", "statistic": "coupled"}]}')
        res = run_suite(cfg, tmp_path / "bundle")
        files = sorted(p.name for p in (tmp_path / "bundle").iterdir())
        assert res.exit_code == 0 and files == ["00_falsify_symmetrization.json", "01_tails.json", "summary.csv"]
        summary = list(csv.DictReader(open(tmp_path / "bundle" / "summary.csv")))
        assert [r["status"] for r in summary] == ["pass", "pass"]

    def test_refused_check(self):
        cfg = load_config('{"n": 8, "checks": [{"check": "tails", "cap": 100}]}')
        res = run_suite(cfg)
        assert res.exit_code == EXIT_CAP and res.results[0].status == "refused"

    def test_default_config_parses(self):
        load_config(default_config_text())


@pytest.mark.slow
def test_shipped_default_suite_passes(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "decouplab", "suite", "--bundle", str(tmp_path / "b"), "--quiet"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr


def test_print_default(capsys):
    code, out, _ = run(capsys, "suite", "--print-default")
    assert code == 0 and json.loads(out)["checks"]


def test_suite_bad_config_file(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text('{"checks": [{"check": "lemma1", "family": "many"}]}')
    code, _, err = run(capsys, "suite", str(p), "--bundle", str(tmp_path / "b"))
    assert code == EXIT_USAGE and "line" in err
