"""Exact integer linear algebra for lattice endomorphisms.

Matrices are small (d <= 6 or so) and entries may grow without bound under
iteration, so everything here works over Python integers and ``Fraction``.
Floating point only enters in :func:`eigen_moduli` (root refinement, with an
exact a-posteriori certificate) and :func:`invariant_splitting`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import mpmath
import numpy as np
import scipy.linalg


class RefinementError(ArithmeticError):
    """Root refinement could not certify the requested tolerance."""


class SplittingError(ValueError):
    """The dominated splitting at the requested level is not defined."""


@dataclass(frozen=True)
class LatticeMatrix:
    """Square integer matrix acting on column vectors of the lattice ``Z^d``."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("LatticeMatrix must be square and nonempty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "LatticeMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, d: int) -> "LatticeMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def diag(cls, *entries: int) -> "LatticeMatrix":
        d = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(d)) for i in range(d)))

    @property
    def d(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: "LatticeMatrix") -> "LatticeMatrix":
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other.rows))
        return LatticeMatrix(
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows)
        )

    def __neg__(self) -> "LatticeMatrix":
        return LatticeMatrix(tuple(tuple(-x for x in r) for r in self.rows))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum(a * x for a, x in zip(r, v)) for r in self.rows)

    def transpose(self) -> "LatticeMatrix":
        return LatticeMatrix(tuple(zip(*self.rows)))

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows])

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def _as_matrix(A) -> LatticeMatrix:
    return A if isinstance(A, LatticeMatrix) else LatticeMatrix.from_rows(A)


def mat_pow(A, n: int) -> LatticeMatrix:
    """Exact ``A**n`` by repeated squaring; ``A**0`` is the identity."""
    A = _as_matrix(A)
    if n < 0:
        raise ValueError("n must be nonnegative")
    result = LatticeMatrix.identity(A.d)
    base = A
    while n:
        if n & 1:
            result = result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination over the integers."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def det(A) -> int:
    return bareiss_det(_as_matrix(A).rows)


def rational_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant of a rational matrix (clears denominators, then Bareiss)."""
    rows = [[Fraction(x) for x in r] for r in rows]
    if not rows:
        return Fraction(1)
    scale = 1
    int_rows = []
    for r in rows:
        den = math.lcm(*(x.denominator for x in r))
        scale *= den
        int_rows.append([int(x * den) for x in r])
    return Fraction(bareiss_det(int_rows), scale)


def rational_inverse(A) -> list[list[Fraction]]:
    """Exact inverse over ``Q`` by Gauss-Jordan elimination."""
    rows = _as_matrix(A).rows if isinstance(A, LatticeMatrix) else A
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [r[n:] for r in m]


def rational_rank(vectors: Sequence[Sequence]) -> int:
    m = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


# --- integer polynomials -------------------------------------------------


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, lowest degree first."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coefficients)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(int(x) for x in c) or (0,))

    @property
    def degree(self) -> int:
        if self.coefficients == (0,):
            return -1
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coefficients))[1:] or (0,))

    def __repr__(self):
        terms = []
        for i in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[i]
            if c:
                terms.append(f"{c}*x^{i}" if i else str(c))
        return "IntPolynomial(" + (" + ".join(terms) or "0") + ")"


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _pneg(p):
    return [-a for a in p]


def _pdivexact(p, q):
    """Exact division of integer polynomials where ``q`` is monic."""
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    while len(q) > 1 and q[-1] == 0:
        q = q[:-1]
    if q[-1] not in (1, -1):
        raise ValueError("divisor must be monic")
    if len(p) < len(q):
        if any(p):
            raise ArithmeticError("inexact polynomial division")
        return [0]
    out = [0] * (len(p) - len(q) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = p[i + len(q) - 1] * q[-1]
        out[i] = c
        if c:
            for j, b in enumerate(q):
                p[i + j] -= c * b
    if any(p):
        raise ArithmeticError("inexact polynomial division")
    return out


def char_poly(A) -> IntPolynomial:
    """Characteristic polynomial ``det(xI - A)``.

    Bareiss elimination over ``Z[x]``.  The pivots are leading principal
    minors of ``xI - A``, which are monic, so no pivoting is needed and
    every division is exact.
    """
    A = _as_matrix(A)
    n = A.d
    m = [[([-A[i, j], 1] if i == j else [-A[i, j]]) for j in range(n)] for i in range(n)]
    prev = [1]
    for k in range(n - 1):
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _padd(_pmul(m[i][j], pivot), _pneg(_pmul(m[i][k], m[k][j])))
                m[i][j] = _pdivexact(num, prev)
        prev = pivot
    return IntPolynomial(tuple(m[n - 1][n - 1]))


def exterior_power(A, k: int) -> LatticeMatrix:
    """Matrix of ``k``-minors, indexed by lexicographically sorted ``k``-subsets."""
    A = _as_matrix(A)
    d = A.d
    if not 0 <= k <= d:
        raise ValueError("k out of range")
    subsets = list(combinations(range(d), k))
    if k == 0:
        return LatticeMatrix(((1,),))
    return LatticeMatrix(
        tuple(
            tuple(bareiss_det([[A[i, j] for j in J] for i in I]) for J in subsets)
            for I in subsets
        )
    )


def sup_norm(M) -> int:
    M = _as_matrix(M)
    return max(abs(x) for r in M.rows for x in r)


# --- spectral data -------------------------------------------------------


@dataclass(frozen=True)
class SpectralData:
    """Root moduli of the characteristic polynomial, sorted descending.

    ``roots`` holds the refined complex roots in the same order, repeated
    according to multiplicity.
    """

    moduli: tuple[float, ...]
    certified_error: tuple[float, ...]
    roots: tuple[complex, ...] = ()


def _fraction_poly(coeffs) -> list[Fraction]:
    return [Fraction(c) for c in coeffs]


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _qdivmod(p, q):
    p = [Fraction(x) for x in p]
    q = _trim(q)
    if len(p) < len(q):
        return [Fraction(0)], _trim(p)
    out = [Fraction(0)] * (len(p) - len(q) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = p[i + len(q) - 1] / q[-1]
        out[i] = c
        if c:
            for j, b in enumerate(q):
                p[i + j] -= c * b
    return out, _trim(p[: len(q) - 1] or [Fraction(0)])


def _qgcd(p, q):
    p, q = _trim(p), _trim(q)
    while q != [0]:
        _, r = _qdivmod(p, q)
        p, q = q, r
    lead = p[-1]
    return [x / lead for x in p]


def _qderiv(p):
    return [i * c for i, c in enumerate(p)][1:] or [Fraction(0)]


def squarefree_decomposition(p: IntPolynomial) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm over ``Q``: returns ``[(factor, multiplicity), ...]``."""
    f = _fraction_poly(p.coefficients)
    lead = f[-1]
    f = [x / lead for x in f]
    out = []
    a = _qgcd(f, _qderiv(f))
    b, _ = _qdivmod(f, a)
    c, _ = _qdivmod(_qderiv(f), a)
    dpoly = _padd_q(c, [-x for x in _qderiv(b)])
    i = 1
    while _trim(b) != [1]:
        a = _qgcd(b, dpoly)
        if len(_trim(a)) > 1:
            out.append((_trim(a), i))
        b, _ = _qdivmod(b, a)
        c, _ = _qdivmod(dpoly, a)
        dpoly = _padd_q(c, [-x for x in _qderiv(b)])
        i += 1
    return out


def _padd_q(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _inclusion_radii(coeffs: list[Fraction], approx: list[complex]) -> list[float]:
    """Exact Weierstrass/Gerschgorin inclusion radii for a monic polynomial.

    With ``W_i = f(z_i) / prod_{j != i}(z_i - z_j)``, the disks
    ``|z - z_i| <= n |W_i|`` contain all roots, and a component made of ``m``
    disks contains exactly ``m`` roots.  Evaluation is done exactly in
    ``Q[i]`` from the binary rationals of the floating approximations, so
    the only rounding is the final square root, which is inflated.
    """
    n = len(approx)
    zs = [(Fraction(z.real), Fraction(z.imag)) for z in approx]

    def cmul(a, b):
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    radii = []
    for i, z in enumerate(zs):
        val = (Fraction(0), Fraction(0))
        for c in reversed(coeffs):
            val = cmul(val, z)
            val = (val[0] + c, val[1])
        den = (Fraction(1), Fraction(0))
        for j, w in enumerate(zs):
            if j != i:
                den = cmul(den, (z[0] - w[0], z[1] - w[1]))
        den_sq = den[0] ** 2 + den[1] ** 2
        if den_sq == 0:
            radii.append(math.inf)
            continue
        w_sq = (val[0] ** 2 + val[1] ** 2) / den_sq
        r = n * math.sqrt(float(w_sq)) * (1 + 1e-12) + 1e-300
        radii.append(r)
    return radii


def _refine_roots(coeffs: list[Fraction], dps: int) -> list[complex]:
    """Companion-matrix solve, then Newton polishing at ``dps`` digits."""
    hi_first = [float(c) for c in reversed(coeffs)]
    initial = np.roots(hi_first) if len(coeffs) > 1 else np.array([])
    with mpmath.workdps(dps):
        mcoeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(coeffs)]
        dcoeffs = [c * (len(mcoeffs) - 1 - i) for i, c in enumerate(mcoeffs[:-1])]
        out = []
        for z0 in initial:
            z = mpmath.mpc(z0)
            for _ in range(100):
                fz = mpmath.polyval(mcoeffs, z)
                dz = mpmath.polyval(dcoeffs, z)
                if dz == 0:
                    break
                step = fz / dz
                z -= step
                if abs(step) <= abs(z) * mpmath.mpf(10) ** (-dps + 5):
                    break
            out.append(complex(z))
    # exact conjugate symmetry for real polynomials
    fixed = []
    for z in out:
        if abs(z.imag) <= 1e-14 * max(1.0, abs(z)):
            fixed.append(complex(z.real, 0.0))
        else:
            fixed.append(z)
    return fixed


def eigen_moduli(A, tol: float = 1e-9) -> SpectralData:
    """Certified moduli of the eigenvalues of ``A``, sorted descending."""
    A = _as_matrix(A)
    p = char_poly(A)
    roots: list[complex] = []
    errors: list[float] = []
    for factor, mult in squarefree_decomposition(p):
        if len(factor) == 2:
            exact = -factor[0] / factor[1]
            zs = [complex(float(exact), 0.0)]
            rs = [float(abs(exact - Fraction(zs[0].real)))]
        else:
            zs = _refine_roots(factor, dps=50)
            rs = _inclusion_radii(factor, zs)
            if max(rs) > tol or not _disjoint(zs, rs):
                raise RefinementError(
                    f"root refinement stalled at error {max(rs):.3g} > tol {tol:g}"
                )
        for z, r in zip(zs, rs):
            roots.extend([z] * mult)
            errors.extend([r] * mult)
    order = sorted(range(len(roots)), key=lambda i: (-abs(roots[i]), -roots[i].real, -roots[i].imag))
    return SpectralData(
        moduli=tuple(abs(roots[i]) for i in order),
        certified_error=tuple(errors[i] for i in order),
        roots=tuple(roots[i] for i in order),
    )


def _disjoint(zs, rs) -> bool:
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            if abs(zs[i] - zs[j]) <= rs[i] + rs[j]:
                return False
    return True


@dataclass(frozen=True)
class SubspaceSplitting:
    """Real orthonormal bases of the dominant and dominated invariant subspaces."""

    k: int
    basis_u: np.ndarray  # shape (d, k), columns span V_u
    basis_s: np.ndarray  # shape (d, d - k)

    @property
    def condition(self) -> float:
        """Condition number of ``[basis_u | basis_s]``; large means near-degenerate."""
        M = np.hstack([self.basis_u, self.basis_s])
        return float(np.linalg.cond(M)) if M.size else 1.0


def _invariant_subspace(A: np.ndarray, select) -> np.ndarray:
    T, Z, sdim = scipy.linalg.schur(A, output="real", sort=select)
    return Z[:, :sdim]


def invariant_splitting(A, k: int, tol: float = 1e-9) -> SubspaceSplitting:
    """Split ``R^d`` into generalized eigenspaces of the ``k`` largest moduli and the rest.

    Complex pairs come out as real 2-planes because the real Schur form keeps
    them as 2x2 blocks.
    """
    A = _as_matrix(A)
    d = A.d
    if not 0 <= k <= d:
        raise ValueError("k out of range")
    sd = eigen_moduli(A, tol)
    mods = sd.moduli
    M = A.to_numpy()
    if k == 0:
        return SubspaceSplitting(0, np.zeros((d, 0)), np.eye(d))
    if k == d:
        return SubspaceSplitting(d, np.eye(d), np.zeros((d, 0)))
    gap = mods[k - 1] - mods[k]
    if gap <= tol + sd.certified_error[k - 1] + sd.certified_error[k]:
        raise SplittingError(
            f"|rho_{k}| = {mods[k - 1]:.12g} and |rho_{k + 1}| = {mods[k]:.12g} are not separated"
        )
    threshold = 0.5 * (mods[k - 1] + mods[k])
    Vu = _invariant_subspace(M, lambda re, im: math.hypot(re, im) > threshold)
    Vs = _invariant_subspace(M, lambda re, im: math.hypot(re, im) < threshold)
    if Vu.shape[1] != k or Vs.shape[1] != d - k:
        raise SplittingError("Schur reordering produced subspaces of the wrong dimension")
    return SubspaceSplitting(k, Vu, Vs)


def invariance_residual(A, basis: np.ndarray) -> float:
    """Max over basis columns of the distance from ``A v`` to ``span(basis)``."""
    if basis.shape[1] == 0:
        return 0.0
    M = _as_matrix(A).to_numpy()
    Q, _ = np.linalg.qr(basis)
    AV = M @ basis
    resid = AV - Q @ (Q.T @ AV)
    return float(np.max(np.linalg.norm(resid, axis=0)))
