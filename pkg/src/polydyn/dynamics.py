"""Degree growth of monomial maps.

The ``k``-th degree of ``phi_A^n`` on ``P^d`` is
``d! * Vol(A^n(S)[k], S[d-k])`` with ``S`` the standard simplex (or the
polytope of another ample divisor).  Dynamical degrees are computed from
eigenvalue moduli only; degree sequences are used to check them, never to
estimate them.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .algebra import AlgebraElement, Current, projection_valuation, pushforward, vol_functional
from .linalg import LatticeMatrix, det, eigen_moduli, exterior_power, invariant_splitting, mat_pow, sup_norm
from .mixed import mixed_volumes_pair_all
from .polytope import Subspace, VPolytope, linear_image, project, standard_simplex

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


class ResonanceError(ValueError):
    """The dominated splitting required by the asymptotic formula does not exist."""


def _as_matrix(A) -> LatticeMatrix:
    return A if isinstance(A, LatticeMatrix) else LatticeMatrix.from_rows(A)


def _require_dominant(A: LatticeMatrix):
    if det(A) == 0:
        raise ZeroDivisionError("monomial map is not dominant (det A = 0)")


def degrees(A, n: int, P: VPolytope | None = None) -> list[Fraction]:
    """``[deg_k(phi_A^n) for k = 0..d]`` from one interpolation."""
    A = _as_matrix(A)
    _require_dominant(A)
    P = P if P is not None else standard_simplex(A.d)
    image = linear_image(mat_pow(A, n), P)
    f = factorial(A.d)
    return [f * v for v in mixed_volumes_pair_all(image, P)]


def degree(A, k: int, n: int, P: VPolytope | None = None) -> Fraction:
    A = _as_matrix(A)
    if not 0 <= k <= A.d:
        raise ValueError("k out of range")
    if n < 0:
        raise ValueError("n must be nonnegative")
    return degrees(A, n, P)[k]


def matrix_hash(A, P: VPolytope | None = None) -> str:
    A = _as_matrix(A)
    payload = {"rows": A.tolist()}
    if P is not None:
        payload["polytope"] = [[str(x) for x in v] for v in P.vertices]
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class DegreeTable:
    matrix: LatticeMatrix
    matrix_hash: str
    d: int
    entries: dict[tuple[int, int], Fraction]
    ample_polytope: VPolytope
    k_values: tuple[int, ...] = ()
    n_values: tuple[int, ...] = ()
    timings: dict[str, float] = field(default_factory=dict)

    def row(self, k: int) -> list[Fraction]:
        return [self.entries[k, n] for n in self.n_values]

    def column(self, n: int) -> list[Fraction]:
        return [self.entries[k, n] for k in self.k_values]

    def __getitem__(self, kn: tuple[int, int]) -> Fraction:
        return self.entries[kn]


def _degrees_job(args):
    rows, n, vertices = args
    A = LatticeMatrix.from_rows(rows)
    P = None
    if vertices is not None:
        from .polytope import hull

        P = hull(vertices)
    return n, degrees(A, n, P)


def degree_table(
    A,
    k_range: Iterable[int],
    n_max: int,
    P: VPolytope | None = None,
    *,
    n_min: int = 1,
    threads: int = 1,
    cache=None,
) -> DegreeTable:
    """All ``deg_k(phi_A^n)`` for ``k`` in ``k_range`` and ``n_min <= n <= n_max``.

    ``cache`` is any object with ``lookup(hash, k, n)`` and
    ``store(hash, k, n, value)`` (see :class:`polydyn.io.DegreeCache`).  With
    ``threads > 1`` the columns are computed in worker processes; the result
    does not depend on the schedule.
    """
    import time

    A = _as_matrix(A)
    _require_dominant(A)
    ks = tuple(sorted(set(k_range)))
    if any(not 0 <= k <= A.d for k in ks):
        raise ValueError("k out of range")
    ns = tuple(range(n_min, n_max + 1))
    h = matrix_hash(A, P)
    entries: dict[tuple[int, int], Fraction] = {}
    missing = []
    t0 = time.perf_counter()
    for n in ns:
        cached = {}
        if cache is not None:
            for k in ks:
                v = cache.lookup(h, k, n)
                if v is not None:
                    cached[k] = v
        if len(cached) == len(ks):
            entries.update({(k, n): v for k, v in cached.items()})
        else:
            missing.append(n)
    verts = None if P is None else [list(v) for v in P.vertices]
    jobs = [(A.tolist(), n, verts) for n in missing]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_degrees_job, jobs))
    else:
        results = [_degrees_job(j) for j in jobs]
    for n, col in sorted(results):
        for k in ks:
            entries[k, n] = col[k]
            if cache is not None:
                cache.store(h, k, n, col[k])
    return DegreeTable(
        matrix=A,
        matrix_hash=h,
        d=A.d,
        entries=dict(sorted(entries.items())),
        ample_polytope=P if P is not None else standard_simplex(A.d),
        k_values=ks,
        n_values=ns,
        timings={"compute_seconds": time.perf_counter() - t0, "computed_columns": len(missing)},
    )


# --- spectral side ---------------------------------------------------------


def dynamical_degrees(A, tol: float = DEFAULT_TOL) -> list[float]:
    """``lambda_k = prod_{j <= k} |rho_j|`` for ``k = 0..d``."""
    A = _as_matrix(A)
    _require_dominant(A)
    mods = eigen_moduli(A, tol).moduli
    out = [1.0]
    for m in mods:
        out.append(out[-1] * m)
    return out


def entropy(A, tol: float = DEFAULT_TOL) -> float:
    return max(math.log(x) for x in dynamical_degrees(A, tol))


def resonance(A, k: int, tol: float = DEFAULT_TOL) -> tuple[float, bool]:
    """``kappa = |rho_{k+1}| / |rho_k|`` and whether ``kappa < 1 - tol``.

    ``k = d`` is accepted with ``kappa = 0`` (nothing is dominated).
    """
    A = _as_matrix(A)
    if not 1 <= k <= A.d:
        raise ValueError("k out of range")
    mods = eigen_moduli(A, tol).moduli
    if k == A.d:
        return 0.0, True
    kappa = mods[k] / mods[k - 1]
    return kappa, kappa < 1 - tol


def _require_strict(A, k, tol):
    kappa, strict = resonance(A, k, tol)
    if not strict:
        raise ResonanceError(f"resonant at k={k}: kappa = {kappa:.12g}")
    return kappa


def _subspaces(A, k, tol):
    split = invariant_splitting(A, k, tol)
    Vu = Subspace(split.basis_u)
    Vs = Subspace(split.basis_s)
    return Vu, Vs, split


@dataclass(frozen=True)
class ThmDConstant:
    value: float
    uncorrected: float
    vol_unstable: float
    vol_transverse: float
    splitting_condition: float


def thmD_constant_report(A, k: int, P: VPolytope | None = None, tol: float = DEFAULT_TOL) -> ThmDConstant:
    """Leading constant of ``deg_k(phi_A^n) ~ C lambda_k^n``.

    ``C = k! (d-k)! Vol_{V_u}(p_{V_u/V_s} P) Vol_{V_u^perp}(p_{V_u^perp} P)``.
    The value without the ``C(d,k)^-1`` factor (``d!`` instead of
    ``k!(d-k)!``) is returned as ``uncorrected``.
    """
    A = _as_matrix(A)
    _require_dominant(A)
    _require_strict(A, k, tol)
    P = P if P is not None else standard_simplex(A.d)
    Vu, Vs, split = _subspaces(A, k, tol)
    vol_u = project(P, Vu, Vs)[1]
    vol_t = project(P, Vu.orthogonal_complement())[1]
    d = A.d
    return ThmDConstant(
        value=factorial(k) * factorial(d - k) * vol_u * vol_t,
        uncorrected=factorial(d) * vol_u * vol_t,
        vol_unstable=vol_u,
        vol_transverse=vol_t,
        splitting_condition=split.condition,
    )


def thmD_constant(A, k: int, P: VPolytope | None = None, tol: float = DEFAULT_TOL) -> float:
    return thmD_constant_report(A, k, P, tol).value


@dataclass
class AsymptoticReport:
    k: int
    lambda_k: float
    kappa: float
    C_predicted: float
    C_empirical: float
    error_sequence: list[tuple[int, float]]
    fitted_decay_rate: float
    C_uncorrected: float = math.nan
    splitting_condition: float = math.nan


def fit_decay_rate(errors: Sequence[tuple[int, float]], floor: float = 1e-12) -> float:
    """Least-squares slope of ``log`` of the upper envelope of ``e_n``.

    The envelope ``max_{m >= n} e_m`` removes the oscillation that complex
    subdominant eigenvalues put on the error.  Entries below ``floor`` are
    dropped; ``-inf`` when nothing is left (exact agreement).
    """
    usable = sorted((n, e) for n, e in errors if e >= floor)
    if not usable:
        return -math.inf
    if len(usable) == 1:
        return math.nan
    env = []
    running = 0.0
    for n, e in reversed(usable):
        running = max(running, e)
        env.append((n, running))
    x = np.array([n for n, _ in env], dtype=float)
    y = np.log([e for _, e in env])
    return float(np.polyfit(x, y, 1)[0])


def thmD_validate(
    A, k: int, n_max: int = 12, P: VPolytope | None = None, tol: float = DEFAULT_TOL
) -> AsymptoticReport:
    A = _as_matrix(A)
    kappa = _require_strict(A, k, tol)
    const = thmD_constant_report(A, k, P, tol)
    lam = dynamical_degrees(A, tol)[k]
    errors = []
    ratio = math.nan
    for n in range(1, n_max + 1):
        deg = degree(A, k, n, P)
        ratio = float(deg / Fraction(lam) ** n) if lam > 0 else math.nan
        errors.append((n, abs(ratio - const.value)))
    return AsymptoticReport(
        k=k,
        lambda_k=lam,
        kappa=kappa,
        C_predicted=const.value,
        C_empirical=ratio,
        error_sequence=errors,
        fitted_decay_rate=fit_decay_rate(errors),
        C_uncorrected=const.uncorrected,
        splitting_condition=const.splitting_condition,
    )


def limit_currents(A, k: int, tol: float = DEFAULT_TOL) -> tuple[Current, Current]:
    """``(T_plus, T_minus)``.

    ``T_minus = [V_u, p_{V_u/V_s}]`` has degree ``d - k``;
    ``T_plus = [V_u^perp, p_{V_u^perp}]`` has degree ``k``.
    """
    A = _as_matrix(A)
    _require_strict(A, k, tol)
    Vu, Vs, _ = _subspaces(A, k, tol)
    T_minus = projection_valuation(Vu, Vs)
    T_plus = projection_valuation(Vu.orthogonal_complement())
    return T_plus, T_minus


def invariant_pairing(A, k: int, alpha: AlgebraElement, beta: AlgebraElement, n: int, tol: float = DEFAULT_TOL) -> float:
    """``Vol(A^n_* alpha * beta) / lambda_k^n`` for ``alpha`` in degree ``k``, ``beta`` in ``d - k``."""
    A = _as_matrix(A)
    lam = dynamical_degrees(A, tol)[k]
    value = vol_functional(pushforward(mat_pow(A, n), alpha) * beta)
    return float(value / Fraction(lam) ** n)


# --- comparison helpers ---------------------------------------------------


def sandwich_ratios(A, k: int, n_max: int, P: VPolytope | None = None, n_min: int = 1) -> list[Fraction]:
    """``deg_k(phi^n) / ||wedge^k A^n||_sup`` for ``n = n_min..n_max``."""
    A = _as_matrix(A)
    out = []
    for n in range(n_min, n_max + 1):
        An = mat_pow(A, n)
        out.append(degree(A, k, n, P) / sup_norm(exterior_power(An, k)))
    return out


def sandwich_constant(ratios: Sequence[Fraction]) -> Fraction:
    """Smallest ``C >= 1`` with every ratio in ``[1/C, C]``."""
    return max([Fraction(1)] + [max(r, 1 / r) for r in ratios])
