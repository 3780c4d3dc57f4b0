import io as stdio
import json
import logging
import subprocess
import sys
from fractions import Fraction

import pytest
from conftest import polytopes
from hypothesis import given
from hypothesis import strategies as st

from polydyn import io
from polydyn.algebra import AlgebraElement, gen
from polydyn.cli import main, parse_args
from polydyn.dynamics import degree_table, matrix_hash
from polydyn.linalg import LatticeMatrix
from polydyn.polytope import standard_simplex, unit_cube

D23 = LatticeMatrix.diag(2, 3)


def run(argv):
    out = stdio.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}

    def write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        paths[name] = p
        return p

    write("A.json", {"d": 2, "rows": [[2, 0], [0, 3]]})
    write("cat.json", {"d": 2, "rows": [[2, 1], [1, 1]]})
    write("shear.json", {"d": 2, "rows": [[1, 1], [0, 1]]})
    write("P.json", {"d": 2, "vertices": [["0", "0"], ["-1", "0"], ["0", "-1"]]})
    write("Q.json", {"d": 2, "vertices": [["0", "0"], ["1", "0"], ["0", "1"], ["1", "1"]]})
    write("bad.json", "{not json")
    write("badshape.json", {"d": 2, "rows": [[1, 2, 3]]})
    write("float.json", {"d": 2, "rows": [[1.5, 0], [0, 1]]})
    return paths


class TestParseArgs:
    def test_dyndeg_defaults(self):
        cfg = parse_args(["dyndeg", "--matrix", "A.json"])
        assert cfg.command == "dyndeg" and cfg.tol == 1e-9 and str(cfg.matrix_path) == "A.json"

    def test_degrees(self):
        cfg = parse_args(["degrees", "--matrix", "A.json", "--kmax", "2", "--nmax", "8", "--out", "t.csv"])
        assert (cfg.kmax, cfg.nmax, str(cfg.out_path)) == (2, 8, "t.csv")

    def test_mixvol(self):
        cfg = parse_args(["mixvol", "P.json", "Q.json", "--k", "1"])
        assert [str(p) for p in cfg.polytope_paths] == ["P.json", "Q.json"] and cfg.k == 1

    def test_invalid_values(self):
        for argv in (["dyndeg", "--tol", "0"], ["degrees", "--nmax", "0"]):
            with pytest.raises(SystemExit) as exc:
                parse_args(argv)
            assert exc.value.code == 2

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit):
            parse_args(["--help"])
        text = capsys.readouterr().out
        for name in ("degrees", "dyndeg", "thmD", "mixvol"):
            assert name in text


class TestExitCodes:
    def test_unknown_flag(self, files):
        assert run(["dyndeg", "--matrix", files["A.json"], "--bogus"])[0] == 2

    def test_missing_matrix(self, files, tmp_path):
        assert run(["dyndeg", "--matrix", tmp_path / "nope.json"])[0] == 3
        assert run(["dyndeg"])[0] == 3
        assert run(["mixvol", files["P.json"], tmp_path / "nope.json", "--k", "1"])[0] == 3

    def test_malformed(self, files):
        for name in ("bad.json", "badshape.json", "float.json"):
            assert run(["dyndeg", "--matrix", files[name]])[0] == 4

    def test_resonant(self, files):
        assert run(["thmD", "--matrix", files["shear.json"], "--k", "1"])[0] == 1

    def test_caps(self, files):
        assert run(["thmD", "--matrix", files["cat.json"], "--k", "1", "--nmax", "13"])[0] == 2

    def test_module_entry_point(self, files):
        proc = subprocess.run([sys.executable, "-m", "polydyn", "dyndeg", "--matrix", str(files["A.json"])], capture_output=True, text=True)
        assert proc.returncode == 0 and "lambda_1 = 3" in proc.stdout


class TestCommands:
    def test_degrees_csv(self, files, tmp_path):
        out = tmp_path / "t.csv"
        code, _ = run(["degrees", "--matrix", files["A.json"], "--kmax", "2", "--nmax", "4", "--out", out])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[:3] == ["k,n,degree", "1,1,3", "1,2,9"]
        meta = json.loads((tmp_path / "t.csv.meta.json").read_text())
        assert meta["lambda"] == [1.0, 3.0, 6.0]
        assert meta["matrix"] == {"d": 2, "rows": [[2, 0], [0, 3]]}
        assert (tmp_path / f"{meta['hash']}.degrees.json").exists()

    def test_empty_k_range(self, files):
        code, text = run(["degrees", "--matrix", files["A.json"], "--kmax", "0", "--nmax", "3"])
        assert code == 0 and text == "k,n,degree\n"

    def test_warm_cache_byte_identical(self, files, tmp_path):
        args = ["degrees", "--matrix", files["cat.json"], "--nmax", "6", "--cache-dir", tmp_path / "c"]
        cold = run(args + ["--out", tmp_path / "a.csv"])
        warm = run(args + ["--out", tmp_path / "b.csv", "--threads", "2"])
        assert cold[0] == warm[0] == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert json.loads((tmp_path / "b.csv.meta.json").read_text())["timings"]["computed_columns"] == 0

    def test_env_cache_dir(self, files, tmp_path, monkeypatch):
        monkeypatch.setenv(io.CACHE_ENV, str(tmp_path / "envcache"))
        assert run(["degrees", "--matrix", files["A.json"], "--nmax", "2"])[0] == 0
        assert list((tmp_path / "envcache").glob("*.degrees.json"))

    def test_plot_data(self, files, tmp_path):
        run(["degrees", "--matrix", files["A.json"], "--nmax", "3", "--plot-dir", tmp_path / "plot"])
        assert (tmp_path / "plot" / "degrees_k1.dat").read_text() == "1 3.0\n2 9.0\n3 27.0\n"

    def test_dyndeg(self, files):
        code, text = run(["dyndeg", "--matrix", files["cat.json"]])
        assert code == 0 and "non-resonant" in text and "entropy = 0.96242365011920" in text

    def test_thmD(self, files):
        code, text = run(["thmD", "--matrix", files["A.json"], "--k", "1", "--nmax", "6"])
        assert code == 0
        assert "C_predicted   = 1" in text and "C_uncorrected = 2" in text and "6,0.000000e+00" in text

    def test_mixvol(self, files):
        code, text = run(["mixvol", files["P.json"], files["Q.json"], "--k", "1"])
        assert code == 0 and text.split()[0] == "1"


class TestCache:
    def test_round_trip(self, tmp_path):
        c = io.DegreeCache(tmp_path)
        assert c.lookup("abc", 1, 2) is None
        c.store("abc", 1, 2, Fraction(-7, 3))
        assert io.DegreeCache(tmp_path).lookup("abc", 1, 2) == Fraction(-7, 3)

    def test_tampered_file(self, tmp_path, caplog):
        h = matrix_hash(D23)
        (tmp_path / f"{h}.degrees.json").write_text("{garbage")
        with caplog.at_level(logging.WARNING):
            t = degree_table(D23, [1], 3, cache=io.DegreeCache(tmp_path))
        assert t.row(1) == [3, 9, 27]
        assert "corrupted" in caplog.text

    def test_tampered_entry(self, tmp_path, caplog):
        h = matrix_hash(D23)
        degree_table(D23, [1], 2, cache=io.DegreeCache(tmp_path))
        path = tmp_path / f"{h}.degrees.json"
        data = json.loads(path.read_text())
        data["entries"]["1,2"] = "nine"
        path.write_text(json.dumps(data))
        with caplog.at_level(logging.WARNING):
            t = degree_table(D23, [1], 2, cache=io.DegreeCache(tmp_path))
        assert t.row(1) == [3, 9] and "corrupted" in caplog.text

    def test_hash_depends_on_polytope(self):
        assert matrix_hash(D23) != matrix_hash(D23, unit_cube(2))


class TestSerialization:
    @given(polytopes(3))
    def test_polytope_round_trip(self, P):
        text = json.dumps(io.polytope_to_json(P))
        assert io.polytope_from_json(json.loads(text)).vertices == P.vertices

    def test_rationals_as_strings(self):
        P = standard_simplex(2).translate((Fraction(1, 3), 0))
        data = io.polytope_to_json(P)
        assert all(isinstance(x, str) for v in data["vertices"] for x in v)
        assert ["1/3", "0"] in data["vertices"]

    def test_float_vertices_rejected(self):
        with pytest.raises(io.MalformedInput):
            io.polytope_from_json({"d": 1, "vertices": [[0.5]]})

    @given(st.lists(st.tuples(st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3)), polytopes(2, 1, 4)), max_size=3))
    def test_element_round_trip(self, terms):
        alpha = sum((c * gen(P) for c, P in terms), AlgebraElement.zero(2))
        data = json.loads(json.dumps(io.element_to_json(alpha)))
        assert io.element_from_json(data) == alpha

    def test_matrix_round_trip(self, tmp_path):
        io.save_matrix(D23, tmp_path / "m.json")
        assert io.load_matrix(tmp_path / "m.json") == D23

    def test_csv_reader(self, tmp_path):
        t = degree_table(D23, [1, 2], 3)
        io.emit_table(t, tmp_path / "t.csv")
        assert io.read_table_csv(tmp_path / "t.csv") == t.entries
