"""Exact rational V-polytopes.

The hull kernel is an incremental placing triangulation run in integer
coordinates (points are scaled by the common denominator).  Boundary cells
of the triangulation are always simplices, so coplanar and other degenerate
configurations need no perturbation: a new point only cones over boundary
simplices it sees strictly.  The volume is the exact sum of the simplex
determinants, and true facets are recovered by grouping boundary simplices
by hyperplane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .linalg import LatticeMatrix, bareiss_det

Vector = tuple[Fraction, ...]


def _vec(p: Iterable) -> Vector:
    return tuple(x if isinstance(x, Fraction) else Fraction(x) for x in p)


@dataclass(frozen=True)
class Facet:
    normal: Vector
    offset: Fraction
    vertex_indices: tuple[int, ...]


@dataclass(frozen=True, eq=True)
class VPolytope:
    """Polytope given by its (irredundant, lexicographically sorted) vertices.

    Build instances with :func:`hull`; the constructor trusts its input.
    """

    d: int
    vertices: tuple[Vector, ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("empty polytope")
        if any(len(v) != self.d for v in self.vertices):
            raise ValueError("vertex of wrong dimension")

    def __hash__(self):
        return hash((self.d, self.vertices))

    def __len__(self):
        return len(self.vertices)

    def __add__(self, other: "VPolytope") -> "VPolytope":
        return minkowski_sum(self, other)

    def __rmul__(self, r) -> "VPolytope":
        return scale(self, r)

    def __neg__(self) -> "VPolytope":
        return scale(self, -1)

    @property
    def dim(self) -> int:
        """Dimension of the affine hull."""
        m = self._cache.get("dim")
        if m is None:
            m = self._cache["dim"] = _hull_data(self)["dim"]
        return m

    @property
    def volume(self) -> Fraction:
        return volume(self)

    def translate(self, t: Sequence) -> "VPolytope":
        t = _vec(t)
        Q = VPolytope(self.d, tuple(sorted(tuple(a + b for a, b in zip(v, t)) for v in self.vertices)))
        for key in ("volume", "dim"):
            if key in self._cache:
                Q._cache[key] = self._cache[key]
        return Q

    def canonical(self) -> "VPolytope":
        """Translate so that the lexicographically smallest vertex is the origin."""
        return self.translate(tuple(-x for x in self.vertices[0]))

    def contains(self, x: Sequence) -> bool:
        if self.dim < self.d:
            raise ValueError("containment test needs a full-dimensional polytope")
        x = _vec(x)
        return all(sum(a * b for a, b in zip(f.normal, x)) <= f.offset for f in facets(self))


# --- integer kernel ------------------------------------------------------


def _to_int_points(points: Sequence[Vector]) -> tuple[list[tuple[int, ...]], int]:
    den = 1
    for p in points:
        for x in p:
            den = math.lcm(den, x.denominator)
    return [tuple(int(x * den) for x in p) for p in points], den


def _pivot_columns(vectors: list[list[int]]) -> list[int]:
    """Column indices of a row-echelon basis of integer ``vectors``.

    Fraction-free elimination; rows are divided by their content to keep
    entries small.
    """
    m = [list(v) for v in vectors if any(v)]
    pivots = []
    row = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(row, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[row], m[p] = m[p], m[row]
        pr = m[row]
        a = pr[c]
        for i in range(row + 1, len(m)):
            b = m[i][c]
            if b:
                ri = [x * a - y * b for x, y in zip(m[i], pr)]
                g = math.gcd(*ri)
                m[i] = [x // g for x in ri] if g > 1 else ri
        pivots.append(c)
        row += 1
        if row == len(m):
            break
    return pivots


def _cross(vectors: list[tuple[int, ...]], m: int) -> list[int]:
    """Generalized cross product of ``m - 1`` vectors in ``Z^m``.

    ``<cross(v_1..v_{m-1}), w> = det(v_1, ..., v_{m-1}, w)``.
    """
    if m == 1:
        return [1]
    out = []
    for j in range(m):
        minor = [[v[c] for c in range(m) if c != j] for v in vectors]
        sign = 1 if (m - 1 + j) % 2 == 0 else -1
        out.append(sign * bareiss_det(minor))
    return out


def _float_vertex_guess(pts: list[tuple[int, ...]]) -> list[int]:
    """Indices Qhull reports as vertices; only an insertion-order hint."""
    if len(pts) <= 2 * len(pts[0]) + 2:
        return []
    try:
        arr = np.array(pts, dtype=float)
        arr -= arr.mean(axis=0)
        arr /= max(np.abs(arr).max(), 1.0)
        return sorted(int(i) for i in ConvexHull(arr).vertices)
    except (QhullError, ValueError, OverflowError):
        return []


def _clearly_interior(pts, candidates, facets) -> set[int]:
    """Points strictly inside every current facet by a wide float margin.

    The hull only grows during placing, so such points can never become
    visible and are skipped without an exact test.
    """
    if len(candidates) < 8:
        return set()
    try:
        N = np.array([f[1] for f in facets.values()], dtype=float)
        off = np.array([f[2] for f in facets.values()], dtype=float)
        X = np.array([pts[q] for q in candidates], dtype=float)
    except OverflowError:
        return set()
    if not (np.isfinite(N).all() and np.isfinite(X).all() and np.isfinite(off).all()):
        return set()
    H = X @ N.T - off
    margin = 1e-9 * (np.abs(X) @ np.abs(N).T + np.abs(off)) + 1e-300
    inside = np.all(H < -margin, axis=1)
    return {q for q, ok in zip(candidates, inside) if ok}


def _placing(pts: list[tuple[int, ...]], m: int, first: Sequence[int] = ()):
    """Placing triangulation of distinct, full-dimensional integer points in ``Z^m``.

    Returns ``(m! * volume, boundary)`` where ``boundary`` is a list of
    ``(vertex_index_tuple, normal, offset)`` with ``<normal, x> <= offset``
    on the hull.  Points in ``first`` are inserted before the rest.
    """
    # initial simplex: greedy rank increase
    base = [0]
    diffs: list[tuple[int, ...]] = []
    for i in range(1, len(pts)):
        cand = tuple(a - b for a, b in zip(pts[i], pts[0]))
        if len(_pivot_columns([list(v) for v in diffs] + [list(cand)])) > len(diffs):
            diffs.append(cand)
            base.append(i)
            if len(base) == m + 1:
                break
    if len(base) != m + 1:
        raise ValueError("points are not full-dimensional")
    centroid = [sum(pts[i][c] for i in base) for c in range(m)]  # (m+1) * true centroid

    facets: dict[int, tuple[tuple[int, ...], list[int], int]] = {}
    ridges: dict[tuple[int, ...], list[int]] = {}
    next_id = 0

    def add_facet(verts: tuple[int, ...]):
        nonlocal next_id
        p0 = pts[verts[0]]
        vecs = [tuple(a - b for a, b in zip(pts[v], p0)) for v in verts[1:]]
        n = _cross(vecs, m)
        off = sum(a * b for a, b in zip(n, p0))
        if sum(a * b for a, b in zip(n, centroid)) > (m + 1) * off:
            n = [-a for a in n]
            off = -off
        fid = next_id
        next_id += 1
        facets[fid] = (verts, n, off)
        for j in range(len(verts)):
            r = verts[:j] + verts[j + 1:]
            ridges.setdefault(r, []).append(fid)

    def drop_facet(fid: int):
        verts = facets.pop(fid)[0]
        for j in range(len(verts)):
            r = verts[:j] + verts[j + 1:]
            lst = ridges[r]
            lst.remove(fid)
            if not lst:
                del ridges[r]

    simplex = tuple(sorted(base))
    for j in range(m + 1):
        add_facet(simplex[:j] + simplex[j + 1:])
    total = abs(bareiss_det([list(v) for v in diffs]))

    # likely vertices first, then far points first: interior points then
    # fail the visibility test early
    in_base = set(base)
    head = [q for q in first if q not in in_base]
    seen = in_base | set(head)
    rest = sorted(
        (q for q in range(len(pts)) if q not in seen),
        key=lambda q: -sum(((m + 1) * a - c) ** 2 for a, c in zip(pts[q], centroid)),
    )
    skip: set[int] = set()
    for pos, q in enumerate(head + rest):
        if pos == len(head) and head:
            skip = _clearly_interior(pts, rest, facets)
        if q in skip:
            continue
        x = pts[q]
        visible = []
        for fid, (verts, n, off) in facets.items():
            h = sum(a * b for a, b in zip(n, x)) - off
            if h > 0:
                visible.append(fid)
                total += h
        if not visible:
            continue
        vis = set(visible)
        new = []
        for fid in visible:
            verts = facets[fid][0]
            for j in range(len(verts)):
                r = verts[:j] + verts[j + 1:]
                if any(g not in vis for g in ridges[r]):
                    new.append(tuple(sorted(r + (q,))))
        for fid in visible:
            drop_facet(fid)
        for verts in new:
            add_facet(verts)
    return total, list(facets.values())


def _hull_core(points: Sequence[Vector]) -> dict:
    """Exact hull data for a nonempty list of rational points."""
    pts = sorted(set(_vec(p) for p in points))
    d = len(pts[0])
    ipts, den = _to_int_points(pts)
    if len(pts) == 1:
        return {"vertices": pts, "dim": 0, "volume": Fraction(int(d == 0)), "facets": None}
    diffs = [[a - b for a, b in zip(p, ipts[0])] for p in ipts[1:]]
    cols = _pivot_columns(diffs)
    m = len(cols)
    if m == 1:
        # points on a line; lexicographic order is monotone along it
        verts = [pts[0], pts[-1]]
        vol = Fraction(abs(ipts[-1][0] - ipts[0][0]), den) if d == 1 else Fraction(0)
        facets = None
        if d == 1:
            facets = [
                Facet((Fraction(-1),), -pts[0][0], (0,)),
                Facet((Fraction(1),), pts[-1][0], (1,)),
            ]
        return {"vertices": verts, "dim": 1, "volume": vol, "facets": facets}
    proj = [tuple(p[c] for c in cols) for p in ipts]
    total, boundary = _placing(proj, m, _float_vertex_guess(proj))

    # group boundary simplices into true facets by hyperplane
    planes: dict[tuple, set[int]] = {}
    for verts, n, off in boundary:
        g = math.gcd(*n, off)
        key = (tuple(a // g for a in n), off // g)
        planes.setdefault(key, set()).update(verts)
    incident: dict[int, list[tuple[int, ...]]] = {}
    for (n, _), verts in planes.items():
        for v in verts:
            incident.setdefault(v, []).append(n)
    extreme = sorted(
        v for v, normals in incident.items() if len(_pivot_columns([list(n) for n in normals])) == m
    )
    vertices = [pts[i] for i in extreme]
    facets = None
    if m == d:
        facets = _LazyFacets(sorted(planes), den, [ipts[i] for i in extreme])
    vol = Fraction(total, math.factorial(m) * den**m) if m == d else Fraction(0)
    return {"vertices": vertices, "dim": m, "volume": vol, "facets": facets}


class _LazyFacets:
    """Facet list materialized on first use (most callers only need volumes)."""

    def __init__(self, planes, den, int_vertices):
        self._planes = planes
        self._den = den
        self._ivs = int_vertices
        self._facets = None

    def get(self) -> list[Facet]:
        if self._facets is None:
            self._facets = [
                Facet(
                    tuple(Fraction(a) for a in n),
                    Fraction(off, self._den),
                    tuple(j for j, v in enumerate(self._ivs) if sum(a * b for a, b in zip(n, v)) == off),
                )
                for n, off in self._planes
            ]
        return self._facets


def _hull_data(P: VPolytope) -> dict:
    data = P._cache.get("hull")
    if data is None:
        data = _hull_core(P.vertices)
        P._cache["hull"] = data
    return data


# --- public operations ---------------------------------------------------


def hull(points: Iterable[Sequence]) -> VPolytope:
    """Convex hull of a nonempty finite point set, as an irredundant V-polytope."""
    pts = [_vec(p) for p in points]
    if not pts:
        raise ValueError("hull of an empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise ValueError("points of mixed dimension")
    data = _hull_core(pts)
    P = VPolytope(d, tuple(data["vertices"]))
    P._cache["hull"] = data
    return P


def volume(P: VPolytope) -> Fraction:
    """Exact ``d``-volume, normalized so that a lattice parallelepiped has volume 1."""
    v = P._cache.get("volume")
    if v is None:
        v = P._cache["volume"] = _hull_data(P)["volume"]
    return v


def facets(P: VPolytope) -> list[Facet]:
    data = _hull_data(P)
    fs = data["facets"]
    if fs is None:
        raise ValueError("facets are only defined for full-dimensional polytopes")
    return fs.get() if isinstance(fs, _LazyFacets) else fs


def minkowski_sum(P: VPolytope, Q: VPolytope) -> VPolytope:
    if P.d != Q.d:
        raise ValueError(f"dimension mismatch: {P.d} != {Q.d}")
    return hull(tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices)


def minkowski_combination(bodies: Sequence[VPolytope], weights: Sequence) -> VPolytope:
    """``sum_i w_i K_i`` for nonnegative rational weights."""
    if not bodies:
        raise ValueError("no bodies")
    d = bodies[0].d
    acc: VPolytope = hull([(Fraction(0),) * d])
    for K, w in zip(bodies, weights):
        if w:
            acc = minkowski_sum(acc, scale(K, w))
    return acc


def scale(P: VPolytope, r) -> VPolytope:
    r = Fraction(r)
    if r == 0:
        return VPolytope(P.d, ((Fraction(0),) * P.d,))
    Q = VPolytope(P.d, tuple(sorted(tuple(r * x for x in v) for v in P.vertices)))
    if "volume" in P._cache or "hull" in P._cache:
        Q._cache["volume"] = volume(P) * abs(r) ** P.d
        Q._cache["dim"] = P.dim
    return Q


def translate(P: VPolytope, t: Sequence) -> VPolytope:
    return P.translate(t)


def linear_image(A, P: VPolytope) -> VPolytope:
    """Image of ``P`` under ``x -> A x``; ``A`` may be rational and non-square."""
    rows = A.rows if isinstance(A, LatticeMatrix) else A
    rows = [[Fraction(x) for x in r] for r in rows]
    if any(len(r) != P.d for r in rows):
        raise ValueError("matrix must have d columns")
    return hull(tuple(sum(a * x for a, x in zip(r, v)) for r in rows) for v in P.vertices)


def standard_simplex(d: int) -> VPolytope:
    """Convex hull of ``0, -e_1, ..., -e_d``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    pts = [(Fraction(0),) * d] + [tuple(Fraction(-int(i == j)) for j in range(d)) for i in range(d)]
    return hull(pts)


def unit_cube(d: int) -> VPolytope:
    return box([1] * d)


def box(sides: Sequence, centered: bool = False) -> VPolytope:
    """Axis-aligned box with the given side lengths (at the origin, or centred)."""
    sides = [Fraction(s) for s in sides]
    d = len(sides)
    lo = [-s / 2 if centered else Fraction(0) for s in sides]
    pts = []
    for mask in range(2**d):
        pts.append(tuple(lo[i] + (sides[i] if mask >> i & 1 else 0) for i in range(d)))
    return hull(pts)


def segment(a: Sequence, b: Sequence) -> VPolytope:
    return hull([a, b])


# --- float projections ---------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of ``R^d`` spanned by the columns of ``basis`` (shape ``(d, k)``)."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if B.ndim != 2:
            raise ValueError("basis must be a 2-d array")
        if B.shape[1] and np.linalg.matrix_rank(B) != B.shape[1]:
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", B)

    @classmethod
    def span(cls, *vectors, d: int | None = None) -> "Subspace":
        if not vectors:
            if d is None:
                raise ValueError("need d for the zero subspace")
            return cls(np.zeros((d, 0)))
        return cls(np.array([[float(x) for x in v] for v in vectors]).T)

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def orthonormal(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((self.ambient, 0))
        Q, _ = np.linalg.qr(self.basis)
        return Q

    def orthogonal_complement(self) -> "Subspace":
        if self.dim == 0:
            return Subspace(np.eye(self.ambient))
        U, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(U[:, self.dim:])


def float_volume(points: np.ndarray, rank_tol: float = 1e-10) -> float:
    """Volume of the convex hull of ``points`` (shape ``(n, m)``) in ``R^m``.

    The zero-dimensional space has volume 1 (counting measure).
    """
    points = np.asarray(points, dtype=float)
    m = points.shape[1]
    if m == 0:
        return 1.0
    if m == 1:
        return float(points.max() - points.min())
    centred = points - points.mean(axis=0)
    scale_ = max(1.0, float(np.abs(centred).max()))
    if np.linalg.matrix_rank(centred, tol=rank_tol * scale_) < m:
        return 0.0
    try:
        return float(ConvexHull(points).volume)
    except QhullError:
        return 0.0


def projection_matrix(H: Subspace, W: Subspace | None = None) -> np.ndarray:
    """Matrix sending ``x`` to coordinates of its projection in an orthonormal basis of ``H``.

    Orthogonal projection if ``W`` is None, otherwise projection parallel to ``W``.
    """
    Q = H.orthonormal
    if W is None:
        return Q.T
    d = H.ambient
    if H.dim + W.dim != d:
        raise ValueError("H and W must have complementary dimensions")
    M = np.hstack([H.basis, W.basis])
    if M.size and np.linalg.matrix_rank(M) < d:
        raise ValueError("H + W is not a direct sum")
    if H.dim == 0:
        return np.zeros((0, d))
    coeffs = np.linalg.solve(M, np.eye(d))[: H.dim]  # H-coordinates in the given basis
    return Q.T @ H.basis @ coeffs


def project(P: VPolytope, H: Subspace, W: Subspace | None = None) -> tuple[np.ndarray, float]:
    """Project ``P`` onto ``H`` (orthogonally, or parallel to ``W``).

    Returns the projected vertex coordinates in an orthonormal basis of ``H``
    and the volume of their hull with respect to the standard metric.
    """
    if H.ambient != P.d:
        raise ValueError("subspace and polytope live in different spaces")
    T = projection_matrix(H, W)
    V = np.array([[float(x) for x in v] for v in P.vertices])
    img = V @ T.T
    vol = float_volume(img)
    if img.shape[1] >= 2 and vol > 0:
        img = img[ConvexHull(img).vertices]
    elif img.shape[1] == 1:
        img = np.array([[img.min()], [img.max()]])
    return img, vol
