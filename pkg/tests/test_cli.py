import json

import pytest

from nclp import serialize
from nclp.cli import main
from nclp.vecnorm import VecElem
from nclp.yeadon import YeadonSpec, random_valid_weights


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture
def elem_file(tmp_path, rng):
    y = VecElem.diagonal(rng.standard_normal(3))
    path = tmp_path / "elem.json"
    serialize.write_text(str(path),
                         serialize.dumps_canonical(serialize.vecelem_to_json(y)))
    return str(path)


class TestSweep:
    def test_row_count_and_columns(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        assert run_cli("sweep", "--p", "3", "--kmin", "2", "--kmax", "6",
                       "--out", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "k,p,formula_lb,numeric_lb,upper_w,threshold_pass"
        assert len(lines) == 6
        assert all(ln.count(",") == 5 for ln in lines)

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert run_cli("sweep", "--p", "3", "--kmin", "2", "--kmax", "4",
                           "--seed", "7", "--out", str(path)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_numeric_cap_blanks(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run_cli("sweep", "--p", "3", "--kmin", "9", "--kmax", "10",
                       "--out", str(out)) == 0
        rows = out.read_text().strip().splitlines()[1:]
        assert all(row.split(",")[3] == "" for row in rows)

    def test_json_format(self, tmp_path):
        out = tmp_path / "sweep.json"
        assert run_cli("sweep", "--p", "3", "--kmin", "2", "--kmax", "3",
                       "--format", "json", "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert len(doc["rows"]) == 2
        assert doc["formula_threshold_k"] > 10 ** 8

    def test_bad_range(self):
        assert run_cli("sweep", "--p", "3", "--kmin", "4", "--kmax", "2") == 2


class TestDiag:
    def test_reports_closed_form(self, capsys):
        assert run_cli("diag", "--k", "4", "--p", "3") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["match"] is True
        assert doc["closed_form"] == pytest.approx(4.0 ** (1.0 / 3.0), rel=1e-14)
        assert doc["upper"] == pytest.approx(doc["closed_form"], rel=1e-3)
        assert doc["lower"] == pytest.approx(doc["closed_form"], abs=1e-9)

    def test_random_coefficients(self, capsys):
        assert run_cli("diag", "--k", "4", "--p", "3", "--random",
                       "--seed", "2") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["match"] is True
        assert doc["closed_form"] != pytest.approx(4.0 ** (1.0 / 3.0))


class TestCounterexample:
    def test_report_flags(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli("counterexample", "--k", "2", "--p", "3",
                       "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        for flag in ("closed_form_match", "witness_norm_ok", "dominance_ok",
                     "cp_ok", "contraction_ok"):
            assert doc[flag] is True

    def test_json_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert run_cli("counterexample", "--k", "2", "--p", "3",
                           "--seed", "5", "--out", str(path)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_cap_is_invalid_input(self):
        assert run_cli("counterexample", "--k", "50", "--p", "3") == 2


class TestNorm:
    def test_writes_certificate(self, elem_file, tmp_path):
        out = tmp_path / "cert.json"
        assert run_cli("norm", "--in", elem_file, "--p", "3",
                       "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["lower"] <= doc["upper"] * (1 + 1e-9)

    def test_r_side(self, elem_file, capsys):
        assert run_cli("norm", "--in", elem_file, "--p", "3",
                       "--side", "r") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["factor_witness"]["transposed"] is True

    def test_missing_file(self):
        assert run_cli("norm", "--in", "/nonexistent.json", "--p", "3") == 2

    def test_malformed_payload(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"k": 2}')
        assert run_cli("norm", "--in", str(bad), "--p", "3") == 2

    def test_bad_exponent(self, elem_file):
        assert run_cli("norm", "--in", elem_file, "--p", "0.5") == 2


class TestYeadonCommand:
    def test_spec_report(self, tmp_path, rng, capsys):
        rw, aw = random_valid_weights(1, 1, 3.0, rng)
        spec = YeadonSpec(n=2, rep_weights=rw, antirep_weights=aw)
        path = tmp_path / "spec.json"
        serialize.write_text(str(path), serialize.dumps_canonical(
            serialize.yeadon_to_json(spec, 3.0)))
        assert run_cli("yeadon", "--in", str(path), "--samples", "3",
                       "--max-iters", "150") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["isometry_worst_error"] < 1e-10
        assert doc["rep_part_violations"] == []
        assert doc["rigid_bound_violations"] == []


class TestSelftest:
    def test_single_criterion(self, capsys):
        assert run_cli("selftest", "--only", "schatten-exactness") == 0
        assert "[PASS] schatten-exactness" in capsys.readouterr().out

    def test_unknown_criterion(self):
        assert run_cli("selftest", "--only", "bogus") == 2
