import csv
import io as stdio
import json
import math

import numpy as np
import pytest

from phase_contract import io
from phase_contract.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def rows(text):
    return list(csv.DictReader(stdio.StringIO(text)))


class TestCG:
    def test_singlet(self, capsys):
        rc, out, _ = run(capsys, "cg", "1", "1", "1", "-1", "0", "0")
        assert rc == 0
        exact, value = out.split()
        assert exact == "+sqrt(1/3)"
        assert float(value) == pytest.approx(1 / math.sqrt(3), rel=1e-15)

    def test_stretched(self, capsys):
        rc, out, _ = run(capsys, "cg", "1/2", "1/2", "1/2", "1/2", "1", "1")
        assert rc == 0 and out.split()[:2] == ["+1", "1"]

    def test_forbidden_m(self, capsys):
        rc, out, _ = run(capsys, "cg", "1", "1", "1", "0", "2", "0")
        assert rc == 0
        assert "M != m1 + m2" in out
        assert float(out.split()[1]) == 0.0

    def test_bad_quantum_numbers(self, capsys):
        rc, _, err = run(capsys, "cg", "1", "2", "1", "0", "2", "2")
        assert rc == 2 and "error" in err

    def test_usage_error(self, capsys):
        rc, _, _ = run(capsys, "cg", "1")
        assert rc == 2


class TestKernel:
    def test_north_pole_half(self, capsys, tmp_path):
        out = tmp_path / "k.json"
        rc, _, _ = run(capsys, "kernel", "--two-s", "1", "--out", str(out))
        assert rc == 0
        header, K = io.read_operator(out)
        assert header == {"two_s": 1}
        assert np.allclose(K, np.diag([(1 + math.sqrt(3)) / 2, (1 - math.sqrt(3)) / 2]), atol=1e-15)

    @pytest.mark.parametrize("method", ["expansion", "rotation"])
    def test_hermitian_roundtrip(self, capsys, method):
        rc, out, _ = run(capsys, "kernel", "--two-s", "4", "--epsilon-mask", "0110", "--theta", "0.8",
                         "--phi", "2.1", "--method", method)
        assert rc == 0
        _, K = io.operator_from_json(out)
        assert np.abs(K - K.conj().T).max() < 1e-13
        assert io.operator_to_json(K, two_s=4) == out.strip()

    def test_bad_mask(self, capsys):
        rc, _, _ = run(capsys, "kernel", "--two-s", "2", "--epsilon-mask", "1")
        assert rc == 2


class TestReconstruct:
    def test_random(self, capsys, tmp_path):
        samples = tmp_path / "s.csv"
        rc, out, _ = run(capsys, "reconstruct", "--two-s", "3", "--seed", "4", "--samples-out", str(samples))
        assert rc == 0
        assert float(out.split()[1]) < 1e-11
        assert list(rows(samples.read_text())[0]) == ["theta", "phi", "weight", "re", "im"]

    def test_operator_file(self, capsys, tmp_path):
        op = tmp_path / "op.json"
        io.write_operator(op, np.diag([1.0, 0.0, -1.0]), two_s=2)
        rc, out, _ = run(capsys, "reconstruct", "--operator", str(op))
        assert rc == 0 and float(out.split()[1]) < 1e-12

    def test_undersampled(self, capsys):
        rc, _, err = run(capsys, "reconstruct", "--two-s", "4", "--n-theta", "3", "--n-phi", "4")
        assert rc == 2 and "bandlimit" in err


class TestAudit:
    def test_pass(self, capsys):
        rc, out, _ = run(capsys, "audit", "--two-s", "4")
        assert rc == 0 and "verdict: PASS" in out

    def test_negative_control(self, capsys):
        rc, out, _ = run(capsys, "audit", "--two-s", "4", "--negative-control")
        assert rc == 1 and "verdict: FAIL" in out

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run(capsys, "audit", "--two-s", "3", "--seed", "9", "--out", str(a))
        run(capsys, "audit", "--two-s", "3", "--seed", "9", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestWigner:
    def test_vacuum_grid(self, capsys):
        rc, out, _ = run(capsys, "wigner", "--fock", "0", "--extent", "1", "--points", "3")
        assert rc == 0
        table = rows(out)
        assert len(table) == 9
        for r in table:
            q, p, w = float(r["q"]), float(r["p"]), float(r["w"])
            assert w == pytest.approx(2 * math.exp(-(q * q + p * p)), rel=1e-12)

    def test_integral_column(self, capsys):
        rc, out, _ = run(capsys, "wigner", "--fock", "1", "--points", "3", "--extent", "1", "--integral-check")
        assert rc == 0
        for r in rows(out):
            assert float(r["w"]) == pytest.approx(float(r["w_integral"]), abs=1e-6)

    def test_state_file_json(self, capsys, tmp_path):
        st = tmp_path / "rho.json"
        io.write_operator(st, np.diag([0.5, 0.5]), n_max=1)
        rc, out, _ = run(capsys, "wigner", "--state", str(st), "--points", "1", "--extent", "0", "--format", "json")
        assert rc == 0
        assert json.loads(out)["w"] == [pytest.approx(0.0, abs=1e-15)]

    def test_needs_state(self, capsys):
        assert run(capsys, "wigner")[0] == 2


class TestContractTable:
    def test_nine_rows(self, capsys):
        rc, out, _ = run(capsys, "contract-table", "--two-s-list", "200,400,800", "--n-list", "0,1,2")
        assert rc == 0
        table = rows(out)
        assert len(table) == 9
        for n in "012":
            errs = [float(r["abs_error"]) for r in table if r["n"] == n]
            assert errs == sorted(errs, reverse=True)

    def test_integral_column(self, capsys):
        rc, out, _ = run(capsys, "contract-table", "--two-s-list", "200", "--n-list", "0,1,2", "--integral")
        assert rc == 0
        assert [float(r["integral_t2"]) for r in rows(out)] == pytest.approx([2, 2, 2], abs=1e-9)

    def test_terms(self, capsys):
        rc, out, _ = run(capsys, "contract-table", "--two-s-list", "40", "--n-list", "1", "--terms", "--integral")
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "l,x_l,term,partial_sum"
        assert lines[-1].startswith("# integral_t2,")
        assert len(lines) == 43

    def test_empty_list(self, capsys):
        assert run(capsys, "contract-table", "--two-s-list", "", "--n-list", "0")[0] == 2

    def test_n_too_large(self, capsys):
        assert run(capsys, "contract-table", "--two-s-list", "40", "--n-list", "3")[0] == 2


class TestCompare:
    def test_origin(self, capsys):
        rc, out, _ = run(capsys, "compare", "--two-s", "200", "--block", "2")
        assert rc == 0
        assert float(rows(out)[0]["deviation"]) < 0.05

    def test_ladder(self, capsys):
        rc, out, _ = run(capsys, "compare", "--s-ladder", "100,200,400", "--alpha-re", "0.5")
        assert rc == 0
        devs = [float(r["deviation"]) for r in rows(out)]
        assert [r["s"] for r in rows(out)] == ["100", "200", "400"]
        assert devs[0] > devs[1] > devs[2]

    def test_block_guard(self, capsys):
        assert run(capsys, "compare", "--two-s", "40", "--block", "3")[0] == 2


class TestSweep:
    def test_json(self, capsys):
        rc, out, _ = run(capsys, "sweep-eps", "--two-s", "2", "--epsilon-mask", "00,10")
        assert rc == 0
        doc = json.loads(out)
        assert doc["converging"] == ["00"]
        assert [p["verdict"] for p in doc["patterns"]] == ["CONVERGES", "NOT-CONVERGES"]


class TestAcceptance:
    def test_only(self, capsys):
        rc, out, _ = run(capsys, "acceptance", "--only", "2,3")
        assert rc == 0
        assert out.count("[PASS]") == 2
