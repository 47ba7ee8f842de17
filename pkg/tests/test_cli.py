"""Command-line interface: exit codes, report shape, determinism."""

import json
from fractions import Fraction

import pytest

from crjet import ExactComplex, FormalMap, TruncatedSeries, extract_jet, family_mc
from crjet import io as cio
from crjet.cli import EXIT_INVALID, EXIT_IO, EXIT_MATH, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def write_json(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(cio.dump_json(obj))
    return str(p)


def linear_map_file(tmp_path, name, eps, r, degree):
    f0 = TruncatedSeries(("z",), degree, {(1,): ExactComplex.coerce(eps)})
    g0 = TruncatedSeries(("z",), degree, {(0,): ExactComplex.coerce(r)})
    return write_json(tmp_path, name, cio.formal_map_dict(FormalMap([f0], [g0])))


@pytest.fixture
def mc_file(tmp_path):
    return write_json(tmp_path, "mc.json", cio.hypersurface_dict(family_mc(1, 1, 14)))


class TestValidateAndInvariants:
    def test_family_invariants(self, capsys):
        code, rep = run(capsys, "invariants", "--family", "mc", "--j", "2")
        assert code == EXIT_OK
        assert rep["result"]["invariants"] == {
            "m": 1, "r": 4, "L": 2, "K": 2, "T": 1,
            "certified_to_degree": rep["result"]["invariants"]["certified_to_degree"]}

    def test_validate_from_file(self, capsys, mc_file):
        code, rep = run(capsys, "validate", mc_file)
        assert code == EXIT_OK
        assert rep["result"]["valid"] is True
        assert rep["inputs"]["input"]["path"] == mc_file
        assert len(rep["inputs"]["input"]["sha256"]) == 64

    def test_finite_type_is_rejected(self, capsys, tmp_path):
        # no s-dependence: Theta = |z|^2 is of finite type
        obj = {"variables": ["z", "chi", "s"], "truncation_degree": 8,
               "terms": [{"exponents": [1, 1, 0], "re": "1", "im": "0"}]}
        path = write_json(tmp_path, "bad.json", obj)
        code, rep = run(capsys, "validate", path)
        assert code == EXIT_INVALID
        assert "error" in rep

    def test_missing_file_is_io_error(self, capsys, tmp_path):
        code, rep = run(capsys, "validate", str(tmp_path / "nope.json"))
        assert code == EXIT_IO
        assert "error" in rep


class TestAnalysis:
    def test_b0_dset(self, capsys):
        code, rep = run(capsys, "dset", "--family", "b0", "--degree", "16")
        assert code == EXIT_OK
        analysis = rep["result"]["analysis"]
        assert analysis["D"] == [0, 1, 2]
        assert analysis["k"] == 4

    def test_jet_order(self, capsys):
        code, rep = run(capsys, "jet-order", "--family", "mc", "--degree", "12")
        assert code == EXIT_OK
        assert rep["result"] == {"k": rep["result"]["k"], "D": [0]}

    def test_upsilon_fixed_n_matches_symbolic_metadata(self, capsys):
        code, rep = run(capsys, "upsilon", "--family", "mc", "--degree", "12",
                        "--n", "3")
        assert code == EXIT_OK
        assert rep["result"]["n"] == 3
        assert len(rep["result"]["components"]) == 4
        code, rep = run(capsys, "upsilon", "--family", "mc", "--degree", "12")
        assert code == EXIT_OK
        assert rep["result"]["n"] == "symbolic"


class TestVerifyReconstruct:
    def test_verify_ok(self, capsys, tmp_path, mc_file):
        mp = linear_map_file(tmp_path, "rot.json", ExactComplex(0, 1), 2, 14)
        code, rep = run(capsys, "verify", mc_file, mc_file, mp)
        assert code == EXIT_OK
        assert rep["result"]["residual_zero"] is True

    def test_verify_nonzero_residual_exits_3(self, capsys, tmp_path, mc_file):
        f0 = TruncatedSeries(("z",), 14, {(1,): ExactComplex(1),
                                          (2,): ExactComplex(1)})
        g0 = TruncatedSeries(("z",), 14, {(0,): ExactComplex(1)})
        mp = write_json(tmp_path, "bad_map.json",
                        cio.formal_map_dict(FormalMap([f0], [g0])))
        code, rep = run(capsys, "verify", mc_file, mc_file, mp)
        assert code == EXIT_MATH
        assert rep["result"]["residual_zero"] is False
        assert rep["result"]["first_offending"]["monomial"] == {
            "z": 1, "chi": 2, "tau": 1}

    def test_reconstruct_round_trip(self, capsys, tmp_path):
        degree = 18
        path = write_json(tmp_path, "mc18.json",
                          cio.hypersurface_dict(family_mc(1, 1, degree)))
        eps = ExactComplex(Fraction(3, 5), Fraction(4, 5))
        f0 = TruncatedSeries(("z",), degree, {(1,): eps})
        g0 = TruncatedSeries(("z",), degree, {(0,): ExactComplex(2)})
        H = FormalMap([f0], [g0])
        jet_path = write_json(tmp_path, "jet.json",
                              cio.jet_data_dict(extract_jet(H, [0])))
        code, rep = run(capsys, "reconstruct", path, path, jet_path,
                        "--order", "4")
        assert code == EXIT_OK
        assert rep["result"]["order"] == 4
        rebuilt = cio.parse_formal_map(rep["result"]["map"])
        assert rebuilt == H

    def test_unrealizable_jet_exits_3(self, capsys, tmp_path, mc_file):
        # modulus clash: |a01| = 1 is forced for a self-map
        jet_path = write_json(tmp_path, "jet.json", {
            "a01": {"re": "2", "im": "0"}, "b00": {"re": "1", "im": "0"}})
        code, rep = run(capsys, "reconstruct", mc_file, mc_file, jet_path,
                        "--order", "2")
        assert code == EXIT_MATH
        assert "error" in rep

    def test_determination_equal(self, capsys, tmp_path, mc_file):
        mp = linear_map_file(tmp_path, "rot.json", ExactComplex(0, 1), 2, 14)
        code, rep = run(capsys, "determination", mc_file, mc_file, mp, mp,
                        "--k", "2")
        assert code == EXIT_OK
        assert rep["result"]["status"] == "equal"

    def test_determination_precondition(self, capsys, tmp_path, mc_file):
        m1 = linear_map_file(tmp_path, "a.json", 1, 1, 14)
        m2 = linear_map_file(tmp_path, "b.json", ExactComplex(0, 1), 1, 14)
        code, rep = run(capsys, "determination", mc_file, mc_file, m1, m2,
                        "--k", "2")
        assert code == EXIT_OK
        assert rep["result"]["status"] == "precondition"


class TestReports:
    def test_reports_are_deterministic(self, capsys):
        argv = ["dset", "--family", "b0", "--degree", "14"]
        code1 = main(argv)
        out1 = capsys.readouterr().out
        code2 = main(argv)
        out2 = capsys.readouterr().out
        assert (code1, code2) == (EXIT_OK, EXIT_OK)
        assert out1 == out2

    def test_parallel_flag_does_not_change_output(self, capsys):
        base = ["invariants", "--family", "nb", "--j", "2", "--degree", "12"]
        main(base)
        out1 = capsys.readouterr().out
        main(["--parallel"] + base)
        out2 = capsys.readouterr().out
        rep1, rep2 = json.loads(out1), json.loads(out2)
        assert rep1["result"] == rep2["result"]
        assert rep1["inputs"] == rep2["inputs"]

    def test_text_mode(self, capsys):
        code = main(["--text", "invariants", "--family", "mc", "--degree", "12"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        with pytest.raises(json.JSONDecodeError):
            json.loads(out)
        assert "invariants" in out

    def test_default_degree_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("CRJET_DEFAULT_DEGREE", "9")
        code, rep = run(capsys, "invariants", "--family", "mc")
        assert code == EXIT_OK
        assert rep["result"]["invariants"]["certified_to_degree"] == 9

    def test_bad_env_degree_is_io_error(self, capsys, monkeypatch):
        monkeypatch.setenv("CRJET_DEFAULT_DEGREE", "many")
        code, rep = run(capsys, "invariants", "--family", "mc")
        assert code == EXIT_IO
