"""McMullen's polytope algebra with rational coefficients.

An :class:`AlgebraElement` is a finite formal combination of translation
classes ``[P]``.  Keys are polytopes translated so that their
lexicographically smallest vertex sits at the origin, which builds the
relation ``[P + t] = [P]`` into the representation.  The union/intersection
relation has no cheap normal form, so two elements are compared through
functionals (:func:`observably_equal`) rather than structurally.

Products are Minkowski sums, ``1 = [{0}]``, and the grading is detected by
dilations: ``D(r) alpha = sum_k r^k alpha_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .linalg import LatticeMatrix, det, rational_inverse
from .mixed import mixed_volumes_pair_all, multinomial, solve_exact
from .polytope import (
    Subspace,
    VPolytope,
    box,
    hull,
    linear_image,
    minkowski_sum,
    project,
    scale,
    standard_simplex,
    volume,
)


def _point(d: int) -> VPolytope:
    return hull([(0,) * d])


class AlgebraElement:
    """Rational combination of polytope classes in ``Q^d``."""

    __slots__ = ("d", "_terms")

    def __init__(self, d: int, terms: Mapping[VPolytope, Fraction] | Iterable = ()):
        self.d = d
        acc: dict[VPolytope, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for P, c in items:
            if P.d != d:
                raise ValueError("polytope of wrong dimension")
            key = P.canonical()
            acc[key] = acc.get(key, Fraction(0)) + Fraction(c)
        self._terms = {P: c for P, c in acc.items() if c != 0}

    @classmethod
    def zero(cls, d: int) -> "AlgebraElement":
        return cls(d)

    @classmethod
    def one(cls, d: int) -> "AlgebraElement":
        return cls(d, {_point(d): 1})

    @property
    def terms(self) -> dict[VPolytope, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def _check(self, other: "AlgebraElement"):
        if other.d != self.d:
            raise ValueError("elements live in different dimensions")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = other * AlgebraElement.one(self.d)
        self._check(other)
        return AlgebraElement(self.d, list(self.items()) + list(other.items()))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.d, {P: -c for P, c in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.d, {P: c * other for P, c in self.items()})
        return product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = AlgebraElement.one(self.d)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        """Structural equality (same canonical terms).  See :func:`observably_equal`."""
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.d == other.d and self._terms == other._terms

    def __hash__(self):
        return hash((self.d, frozenset(self._terms.items())))

    def __repr__(self):
        parts = [f"{c}*[{len(P)} vertices]" for P, c in sorted(self.items(), key=lambda t: t[0].vertices)]
        return f"AlgebraElement(d={self.d}, " + (" + ".join(parts) or "0") + ")"


def gen(P: VPolytope) -> AlgebraElement:
    """The class ``[P]``."""
    return AlgebraElement(P.d, {P: 1})


def product(alpha: AlgebraElement, beta: AlgebraElement) -> AlgebraElement:
    alpha._check(beta)
    acc = []
    for P, a in alpha.items():
        for Q, b in beta.items():
            acc.append((minkowski_sum(P, Q), a * b))
    return AlgebraElement(alpha.d, acc)


def dilate(alpha: AlgebraElement, r) -> AlgebraElement:
    """``D(r)``: ``[P] -> [rP]`` for rational ``r >= 0``."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("dilation factor must be nonnegative")
    return AlgebraElement(alpha.d, [(scale(P, r), c) for P, c in alpha.items()])


def log_class(P: VPolytope) -> AlgebraElement:
    """``log[P] = sum_{r=1}^d (-1)^(r+1)/r ([P]-1)^r``, expanded in the classes ``[jP]``.

    Uses ``[P]^j = [jP]``, so the result is a combination of ``[jP]`` for
    ``j = 0..d``.
    """
    d = P.d
    coeffs = [Fraction(0)] * (d + 1)
    for r in range(1, d + 1):
        lead = Fraction((-1) ** (r + 1), r)
        for j in range(r + 1):
            coeffs[j] += lead * comb(r, j) * (-1) ** (r - j)
    return AlgebraElement(d, [(scale(P, j), c) for j, c in enumerate(coeffs)])


def graded_part(alpha: AlgebraElement, k: int, probes: Sequence | None = None) -> AlgebraElement:
    """Degree-``k`` component of ``alpha`` as a combination of dilates.

    With ``D(r) alpha = sum_j r^j alpha_j`` for ``j = 0..d``, choosing weights
    ``c_i`` with ``sum_i c_i r_i^j = [j == k]`` gives
    ``sum_i c_i D(r_i) alpha = alpha_k``.
    """
    d = alpha.d
    if not 0 <= k <= d:
        raise ValueError("k out of range")
    probes = [Fraction(r) for r in (probes if probes is not None else range(1, d + 2))]
    if len(probes) != d + 1:
        raise ValueError(f"need exactly d+1 = {d + 1} probes")
    if len(set(probes)) != len(probes):
        raise ValueError("probes must be distinct")
    if any(r <= 0 for r in probes):
        raise ValueError("probes must be positive")
    system = [[r**j for r in probes] for j in range(d + 1)]
    weights = solve_exact(system, [int(j == k) for j in range(d + 1)])
    out = AlgebraElement.zero(d)
    for r, w in zip(probes, weights):
        if w:
            out = out + w * dilate(alpha, r)
    return out


def vol_functional(alpha: AlgebraElement) -> Fraction:
    return sum((c * volume(P) for P, c in alpha.items()), Fraction(0))


def _rows(A) -> list[list[Fraction]]:
    rows = A.rows if isinstance(A, LatticeMatrix) else A
    return [[Fraction(x) for x in r] for r in rows]


def pushforward(A, alpha: AlgebraElement) -> AlgebraElement:
    """``A_*``: ``[P] -> [A(P)]``."""
    return AlgebraElement(alpha.d, [(linear_image(A, P), c) for P, c in alpha.items()])


def _abs_det(A) -> Fraction:
    if isinstance(A, LatticeMatrix):
        return Fraction(abs(det(A)))
    from .linalg import rational_det

    return abs(rational_det(_rows(A)))


def _exact_root(x: Fraction, k: int) -> Fraction | None:
    def iroot(n: int) -> int | None:
        lo, hi = 0, 1
        while hi**k <= n:
            hi *= 2
        while lo < hi - 1:
            mid = (lo + hi) // 2
            if mid**k <= n:
                lo = mid
            else:
                hi = mid
        return lo if lo**k == n else None

    num, den = iroot(x.numerator), iroot(x.denominator)
    return None if num is None or den is None else Fraction(num, den)


def pullback(A, alpha: AlgebraElement, k: int | None = None) -> AlgebraElement:
    """``A^*[P] = |det A| [A^{-1}(P)]``.

    When the caller asserts ``alpha`` is homogeneous of degree ``k`` and
    ``|det A|^(1/k)`` is rational, the graded form
    ``D(|det A|^(1/k)) (A^{-1})_*`` is used instead; both agree on ``Pi_k``.
    """
    a = _abs_det(A)
    if a == 0:
        raise ZeroDivisionError("pullback needs an invertible matrix")
    Ainv = rational_inverse(_rows(A))
    if k is not None and 1 <= k <= alpha.d:
        root = _exact_root(a, k)
        if root is not None:
            return dilate(pushforward(Ainv, alpha), root)
    return a * pushforward(Ainv, alpha)


def mixed_volume_elements(alpha: AlgebraElement, beta: AlgebraElement, k: int) -> Fraction:
    """Bilinear extension ``Vol(alpha[k], beta[d-k])``."""
    alpha._check(beta)
    total = Fraction(0)
    for P, a in alpha.items():
        for Q, b in beta.items():
            total += a * b * mixed_volumes_pair_all(P, Q)[k]
    return total


def madison_mixed_volume(alpha: AlgebraElement, beta: AlgebraElement, k: int, probes=None) -> Fraction:
    """``Vol(alpha[k], beta[d-k])`` through graded parts: ``C(d,k)^-1 Vol(alpha_k beta_{d-k})``."""
    d = alpha.d
    top = vol_functional(graded_part(alpha, k, probes) * graded_part(beta, d - k, probes))
    return top / multinomial(d, (k, d - k))


# --- currents -------------------------------------------------------------


@dataclass(frozen=True)
class Current:
    """Linear form on the polytope algebra.

    ``kind`` is one of ``"projection"`` (``[H, p]``: volume of the image under a
    projection onto ``H``, orthogonal or parallel to ``W``), ``"volume"``
    (``beta -> Vol(alpha * beta)``), ``"pullback"`` (``beta -> T(A_* beta)``) or
    ``"pushforward"`` (``beta -> T(A^* beta)``).
    """

    kind: str
    d: int
    degree: int | None = None
    H: Subspace | None = None
    W: Subspace | None = None
    alpha: AlgebraElement | None = field(default=None, compare=False)
    matrix: object = None
    base: "Current | None" = None

    def __call__(self, beta: AlgebraElement):
        return eval_current(self, beta)


def projection_valuation(H: Subspace, W: Subspace | None = None) -> Current:
    """``[H, p]``; has degree ``codim H`` and is nonzero only on ``Pi_{dim H}``."""
    if W is not None and H.dim + W.dim != H.ambient:
        raise ValueError("H and W must be complementary")
    return Current("projection", H.ambient, H.ambient - H.dim, H=H, W=W)


def volume_current(alpha: AlgebraElement, degree: int | None = None) -> Current:
    return Current("volume", alpha.d, degree, alpha=alpha)


def pullback_current(A, T: Current) -> Current:
    """``<A^* T, beta> = <T, A_* beta>``."""
    return Current("pullback", T.d, T.degree, matrix=A, base=T)


def pushforward_current(A, T: Current) -> Current:
    """``<A_* T, beta> = <T, A^* beta>``."""
    return Current("pushforward", T.d, T.degree, matrix=A, base=T)


def eval_current(T: Current, beta: AlgebraElement):
    if beta.d != T.d:
        raise ValueError("current and element live in different dimensions")
    if T.kind == "projection":
        return sum(float(c) * project(P, T.H, T.W)[1] for P, c in beta.items())
    if T.kind == "volume":
        return vol_functional(T.alpha * beta)
    if T.kind == "pullback":
        return eval_current(T.base, pushforward(T.matrix, beta))
    if T.kind == "pushforward":
        return eval_current(T.base, pullback(T.matrix, beta))
    raise ValueError(f"unknown current kind {T.kind!r}")


def probe_functionals(d: int) -> list[Current]:
    """Fixed battery used for observable equality.

    Volume pairings against dilates of simplices, boxes and their sums (the
    dilates separate graded components), plus orthogonal projection
    valuations onto coordinate subspaces.
    """
    S = standard_simplex(d)
    C = box([1] * d)
    bases = [AlgebraElement.one(d), gen(S), gen(-S), gen(C), gen(S) * gen(C)]
    probes: list[Current] = []
    for beta in bases:
        for r in range(1, d + 2):
            probes.append(volume_current(dilate(beta, r)))
    eye = np.eye(d)
    for m in range(1, d):
        for I in combinations(range(d), m):
            probes.append(projection_valuation(Subspace(eye[:, list(I)])))
    return probes


def observably_equal(
    alpha: AlgebraElement,
    beta: AlgebraElement,
    probes: Sequence[Current] | None = None,
    atol: float = 1e-9,
) -> bool:
    """True when every probe functional agrees on ``alpha`` and ``beta``.

    Exact comparison for rational-valued functionals, ``atol`` for the
    float-valued projection currents.
    """
    alpha._check(beta)
    diff = alpha - beta
    for T in probes if probes is not None else probe_functionals(alpha.d):
        v = eval_current(T, diff)
        if isinstance(v, Fraction):
            if v != 0:
                return False
        elif abs(v) > atol:
            return False
    return True


def degree_pairing_matrix(alpha: AlgebraElement, beta: AlgebraElement) -> list[list[Fraction]]:
    """``M[i][j] = Vol(alpha_i * beta_j)``; nonzero only when ``i + j = d``."""
    d = alpha.d
    a_parts = [graded_part(alpha, i) for i in range(d + 1)]
    b_parts = [graded_part(beta, j) for j in range(d + 1)]
    return [[vol_functional(a * b) for b in b_parts] for a in a_parts]

