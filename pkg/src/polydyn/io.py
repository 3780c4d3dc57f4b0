"""JSON/CSV serialization and the on-disk degree cache.

Rationals are always persisted as ``"p/q"`` strings.
"""

from __future__ import annotations

import csv
import io as _io
import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .algebra import AlgebraElement
from .linalg import LatticeMatrix
from .polytope import VPolytope, hull

log = logging.getLogger(__name__)

CACHE_ENV = "POLYDYN_CACHE_DIR"


class MalformedInput(ValueError):
    """Input file is not valid JSON or does not have the expected shape."""


def fraction_to_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fraction_from_str(s) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise MalformedInput(f"expected an integer or 'p/q' string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise MalformedInput(f"not a rational: {s!r}") from exc


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedInput(f"{path}: top level must be an object")
    return data


# --- matrices ----------------------------------------------------------------


def matrix_to_json(A: LatticeMatrix) -> dict:
    return {"d": A.d, "rows": A.tolist()}


def matrix_from_json(data: dict) -> LatticeMatrix:
    try:
        d = data["d"]
        rows = data["rows"]
        if len(rows) != d or any(len(r) != d for r in rows):
            raise MalformedInput("rows do not form a d x d matrix")
        if any(not isinstance(x, int) or isinstance(x, bool) for r in rows for x in r):
            raise MalformedInput("matrix entries must be integers")
        return LatticeMatrix.from_rows(rows)
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad matrix JSON: {exc}") from exc


def load_matrix(path) -> LatticeMatrix:
    return matrix_from_json(_load_json(path))


def save_matrix(A: LatticeMatrix, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(A)) + "\n")


# --- polytopes ---------------------------------------------------------------


def polytope_to_json(P: VPolytope) -> dict:
    return {"d": P.d, "vertices": [[fraction_to_str(x) for x in v] for v in P.vertices]}


def polytope_from_json(data: dict) -> VPolytope:
    try:
        d = data["d"]
        verts = [[fraction_from_str(x) for x in v] for v in data["vertices"]]
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad polytope JSON: {exc}") from exc
    if not verts or any(len(v) != d for v in verts):
        raise MalformedInput("vertex lengths do not match d")
    return hull(verts)


def load_polytope(path) -> VPolytope:
    return polytope_from_json(_load_json(path))


def save_polytope(P: VPolytope, path) -> None:
    Path(path).write_text(json.dumps(polytope_to_json(P)) + "\n")


def element_to_json(alpha: AlgebraElement) -> dict:
    terms = sorted(
        ({"coeff": fraction_to_str(c), "polytope": polytope_to_json(P)} for P, c in alpha.items()),
        key=lambda t: json.dumps(t, sort_keys=True),
    )
    return {"d": alpha.d, "terms": terms}


def element_from_json(data: dict) -> AlgebraElement:
    try:
        d = data["d"]
        terms = {}
        for t in data["terms"]:
            P = polytope_from_json(t["polytope"])
            terms[P] = terms.get(P, Fraction(0)) + fraction_from_str(t["coeff"])
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad algebra element JSON: {exc}") from exc
    return AlgebraElement(d, terms)


# --- degree tables -------------------------------------------------------------


def table_csv(table) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "n", "degree"])
    for (k, n), v in sorted(table.entries.items()):
        w.writerow([k, n, fraction_to_str(v)])
    return buf.getvalue()


def table_meta(table, lambdas: Iterable[float] | None = None) -> dict:
    return {
        "matrix": matrix_to_json(table.matrix),
        "hash": table.matrix_hash,
        "ample_polytope": polytope_to_json(table.ample_polytope),
        "k_values": list(table.k_values),
        "n_values": list(table.n_values),
        "lambda": None if lambdas is None else [float(x) for x in lambdas],
        "timings": table.timings,
    }


def emit_table(table, path, lambdas: Iterable[float] | None = None) -> Path:
    """Write ``path`` (CSV) and ``path.meta.json``; returns the meta path.

    Timings go only into the meta file, so the CSV is byte-identical across
    runs.
    """
    path = Path(path)
    path.write_text(table_csv(table))
    meta = path.with_name(path.name + ".meta.json")
    meta.write_text(json.dumps(table_meta(table, lambdas), indent=2, sort_keys=True) + "\n")
    return meta


def read_table_csv(path) -> dict[tuple[int, int], Fraction]:
    with open(path, newline="") as fh:
        return {(int(r["k"]), int(r["n"])): Fraction(r["degree"]) for r in csv.DictReader(fh)}


def plot_series(table) -> dict[int, list[tuple[int, Fraction]]]:
    out: dict[int, list] = {}
    for (k, n), v in sorted(table.entries.items()):
        out.setdefault(k, []).append((n, v))
    return out


def emit_plot_data(table, directory, stem: str = "degrees") -> list[Path]:
    """One whitespace-separated ``n value`` file per ``k``; values as floats for plotting."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, series in plot_series(table).items():
        p = directory / f"{stem}_k{k}.dat"
        p.write_text("".join(f"{n} {float(v)!r}\n" for n, v in series))
        paths.append(p)
    return paths


# --- cache ---------------------------------------------------------------------


def default_cache_dir() -> Path | None:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


class DegreeCache:
    """``<dir>/<hash>.degrees.json`` mapping ``"k,n"`` to ``"p/q"``.

    Best effort: unreadable files and malformed entries are logged and
    treated as missing.  Writes go through a temp file and ``os.replace``.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self._loaded: dict[str, dict[str, str]] = {}

    def _path(self, h: str) -> Path:
        return self.directory / f"{h}.degrees.json"

    def _entries(self, h: str) -> dict[str, str]:
        if h not in self._loaded:
            entries = {}
            p = self._path(h)
            if p.exists():
                try:
                    data = json.loads(p.read_text())
                    if not isinstance(data, dict) or not isinstance(data.get("entries"), dict):
                        raise ValueError("unexpected layout")
                    entries = data["entries"]
                except (ValueError, OSError) as exc:
                    log.warning("ignoring corrupted cache file %s: %s", p, exc)
            self._loaded[h] = entries
        return self._loaded[h]

    def lookup(self, h: str, k: int, n: int) -> Fraction | None:
        raw = self._entries(h).get(f"{k},{n}")
        if raw is None:
            return None
        try:
            if not isinstance(raw, str):
                raise ValueError(raw)
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            log.warning("ignoring corrupted cache entry %s (%d,%d): %r", h, k, n, raw)
            return None

    def store(self, h: str, k: int, n: int, value) -> None:
        entries = self._entries(h)
        entries[f"{k},{n}"] = fraction_to_str(value)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            p = self._path(h)
            tmp = p.with_suffix(".tmp")
            ordered = dict(sorted(entries.items(), key=lambda kv: tuple(map(int, kv[0].split(",")))))
            tmp.write_text(json.dumps({"hash": h, "entries": ordered}, indent=1) + "\n")
            os.replace(tmp, p)
        except OSError as exc:
            log.warning("cache write failed for %s: %s", h, exc)
