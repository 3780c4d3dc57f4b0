"""Mixed volumes of rational polytopes.

Normalization: ``Vol(r_1 K_1 + ... + r_s K_s)`` expands as
``sum multinomial(d; k) * Vol(K_1[k_1], ..., K_s[k_s]) * r^k``, so that
``Vol(K[d]) = Vol(K)``.  All functions return values in this convention.

Two unrelated algorithms are provided: exact polynomial interpolation of the
Minkowski-Steiner polynomial, and inclusion-exclusion over subset Minkowski
sums (polarization).  They share only the volume kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial, prod
from typing import Sequence

from .polytope import VPolytope, minkowski_combination, minkowski_sum, scale, volume


def multinomial(d: int, ks: Sequence[int]) -> int:
    out = factorial(d)
    for k in ks:
        out //= factorial(k)
    return out


def solve_exact(matrix: list[list], rhs: list) -> list[Fraction]:
    """Gauss-Jordan over ``Q`` for a square nonsingular system."""
    n = len(matrix)
    m = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular interpolation system")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [row[n] for row in m]


def steiner_coefficients(P: VPolytope, Q: VPolytope) -> list[Fraction]:
    """Coefficients ``c_0..c_d`` of ``t -> Vol(tP + Q)``, from its values at ``t = 0..d``."""
    if P.d != Q.d:
        raise ValueError("dimension mismatch")
    d = P.d
    values = [volume(minkowski_sum(scale(P, t), Q)) for t in range(d + 1)]
    vander = [[t**j for j in range(d + 1)] for t in range(d + 1)]
    return solve_exact(vander, values)


def mixed_volumes_pair_all(P: VPolytope, Q: VPolytope) -> list[Fraction]:
    """``[Vol(P[k], Q[d-k]) for k = 0..d]`` from a single interpolation."""
    coeffs = steiner_coefficients(P, Q)
    d = P.d
    return [c / comb(d, k) for k, c in enumerate(coeffs)]


def mixed_volume_pair(P: VPolytope, Q: VPolytope, k: int) -> Fraction:
    """``Vol(P[k], Q[d-k])`` by exact interpolation of ``Vol(tP + Q)``."""
    if not 0 <= k <= P.d:
        raise ValueError("k out of range")
    return mixed_volumes_pair_all(P, Q)[k]


@dataclass(frozen=True)
class MixedVolumeQuery:
    bodies: tuple[VPolytope, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if not self.bodies or len(self.bodies) != len(self.multiplicities):
            raise ValueError("need one multiplicity per body")
        d = self.bodies[0].d
        if any(K.d != d for K in self.bodies):
            raise ValueError("bodies live in different dimensions")
        if any(k < 0 for k in self.multiplicities) or sum(self.multiplicities) != d:
            raise ValueError(f"multiplicities must be nonnegative and sum to d={d}")

    @property
    def d(self) -> int:
        return self.bodies[0].d


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def mixed_volume_multi(q: MixedVolumeQuery) -> Fraction:
    """``Vol(K_1[k_1], ..., K_s[k_s])`` by multivariate interpolation.

    ``Vol(sum r_i K_i)`` is homogeneous of degree ``d``, so it is fixed by its
    values on the lattice simplex ``{r in N^s : |r| = d}``; the monomials of
    degree ``d`` form the basis.
    """
    d, s = q.d, len(q.bodies)
    if s == 1:
        return volume(q.bodies[0])
    exps = list(_compositions(d, s))
    values = [volume(minkowski_combination(q.bodies, r)) for r in exps]
    matrix = [[prod(ri**ei for ri, ei in zip(r, e)) for e in exps] for r in exps]
    coeffs = solve_exact(matrix, values)
    target = exps.index(tuple(q.multiplicities))
    return coeffs[target] / multinomial(d, q.multiplicities)


def mixed_volume(bodies: Sequence[VPolytope], multiplicities: Sequence[int]) -> Fraction:
    return mixed_volume_multi(MixedVolumeQuery(tuple(bodies), tuple(multiplicities)))


def mixed_volume_polarization(P: VPolytope, Q: VPolytope, k: int) -> Fraction:
    """``Vol(P[k], Q[d-k])`` by inclusion-exclusion.

    Full polarization over the ``d`` slots ``(P,..,P,Q,..,Q)``; subsets with
    ``a`` copies of ``P`` and ``b`` of ``Q`` all give ``Vol(aP + bQ)``, so
    they are grouped with multiplicity ``C(k,a) C(d-k,b)``.
    """
    if P.d != Q.d:
        raise ValueError("dimension mismatch")
    d = P.d
    if not 0 <= k <= d:
        raise ValueError("k out of range")
    total = Fraction(0)
    for a in range(k + 1):
        for b in range(d - k + 1):
            if a == b == 0:
                continue
            v = volume(minkowski_sum(scale(P, a), scale(Q, b)))
            sign = -1 if (d - a - b) % 2 else 1
            total += sign * comb(k, a) * comb(d - k, b) * v
    return total / factorial(d)


def mixed_volume_polarization_multi(bodies: Sequence[VPolytope]) -> Fraction:
    """``Vol(K_1, ..., K_d)`` (one slot per body) by inclusion-exclusion over subsets."""
    d = bodies[0].d
    if len(bodies) != d:
        raise ValueError("need exactly d bodies")
    total = Fraction(0)
    for size in range(1, d + 1):
        sign = -1 if (d - size) % 2 else 1
        for I in combinations(range(d), size):
            total += sign * volume(minkowski_combination([bodies[i] for i in I], [1] * size))
    return total / factorial(d)


def box_mixed_volume(r: Sequence, s: Sequence, k: int) -> Fraction:
    """Mixed volume of two axis-parallel boxes with side vectors ``r`` and ``s``.

    ``Vol(D_r[k], D_s[d-k]) = C(d,k)^-1 * sum_{|I|=k} r^I s^(I^c)``.
    """
    r = [Fraction(x) for x in r]
    s = [Fraction(x) for x in s]
    d = len(r)
    if len(s) != d or not 0 <= k <= d:
        raise ValueError("bad arguments")
    total = Fraction(0)
    for I in combinations(range(d), k):
        Iset = set(I)
        total += prod((r[i] if i in Iset else s[i] for i in range(d)), start=Fraction(1))
    return total / comb(d, k)

