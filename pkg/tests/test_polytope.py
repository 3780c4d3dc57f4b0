from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from conftest import full_polytopes, int_matrices, points, polytopes, rationals
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from polydyn.linalg import LatticeMatrix, det
from polydyn.polytope import (
    Subspace,
    box,
    facets,
    float_volume,
    hull,
    linear_image,
    minkowski_sum,
    project,
    scale,
    segment,
    standard_simplex,
    translate,
    unit_cube,
    volume,
)

F = Fraction
SIGMA2 = standard_simplex(2)


def vset(P):
    return set(P.vertices)


class TestHull:
    def test_interior_point_dropped(self):
        P = hull([(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))])
        assert vset(P) == {(0, 0), (1, 0), (0, 1)}

    def test_single_point(self):
        assert hull([(F(1, 3), 2)]).vertices == ((F(1, 3), 2),)

    def test_pairwise_sums(self):
        A = linear_image(LatticeMatrix.diag(2, 3), SIGMA2)
        sums = [tuple(a + b for a, b in zip(p, q)) for p in SIGMA2.vertices for q in A.vertices]
        assert len(sums) == 9
        assert vset(hull(sums)) == {(0, 0), (-3, 0), (-1, -3), (0, -4)}

    def test_collinear_and_coplanar(self):
        assert vset(hull([(0, 0), (1, 1), (3, 3), (2, 2)])) == {(0, 0), (3, 3)}
        P = hull([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1), (F(1, 2), F(1, 2), 1)])
        assert len(P.vertices) == 4 and P.dim == 2

    def test_vertices_are_lex_sorted(self):
        P = hull([(1, 0), (0, 1), (0, 0), (1, 1)])
        assert list(P.vertices) == sorted(P.vertices)

    @given(points(3, 1, 9))
    def test_idempotent(self, pts):
        P = hull(pts)
        assert hull(P.vertices) == P

    @given(points(3, 4, 10))
    def test_vertices_match_scipy(self, pts):
        P = hull(pts)
        arr = np.array([[float(x) for x in p] for p in set(pts)])
        if P.dim < 3:
            return
        ref = {tuple(arr[i]) for i in ConvexHull(arr).vertices}
        assert {tuple(float(x) for x in v) for v in P.vertices} == ref

    def test_cube_facets(self):
        fs = facets(unit_cube(3))
        assert len(fs) == 6
        assert all(len(f.vertex_indices) == 4 for f in fs)


class TestVolume:
    @pytest.mark.parametrize("d", range(1, 7))
    def test_simplex(self, d):
        assert volume(standard_simplex(d)) == F(1, factorial(d))

    @pytest.mark.parametrize("d", range(1, 6))
    def test_cube(self, d):
        assert volume(unit_cube(d)) == 1

    def test_quadrilateral(self):
        assert volume(hull([(0, 0), (-3, 0), (-1, -3), (0, -4)])) == F(13, 2)

    def test_lower_dimensional(self):
        assert volume(segment((0, 0), (3, 1))) == 0
        assert volume(hull([(1, 2, 3)])) == 0

    def test_hexagon(self):
        H = minkowski_sum(SIGMA2, -SIGMA2)
        assert len(H.vertices) == 6 and volume(H) == 3

    @given(points(3, 4, 9))
    def test_matches_scipy(self, pts):
        P = hull(pts)
        assert float(volume(P)) == pytest.approx(float_volume(np.array(P.vertices, dtype=float)), abs=1e-9)

    @given(polytopes(3), st.tuples(rationals, rationals, rationals))
    def test_translation_invariant(self, P, t):
        assert volume(translate(P, t)) == volume(P)

    @given(polytopes(3, 1, 6), int_matrices(3))
    def test_linear_image_scales_by_det(self, P, A):
        assert volume(linear_image(A, P)) == abs(det(A)) * volume(P)

    @given(full_polytopes(2), st.builds(F, st.integers(0, 5), st.integers(1, 3)))
    def test_homogeneous(self, P, r):
        assert volume(scale(P, r)) == r**2 * volume(P)

    def test_monte_carlo_within_three_sigma(self):
        rng = np.random.default_rng(20240611)
        for _ in range(5):
            pts = [tuple(F(int(x), 4) for x in rng.integers(-8, 9, size=3)) for _ in range(8)]
            P = hull(pts)
            if P.dim < 3:
                continue
            arr = np.array(P.vertices, dtype=float)
            lo, hi = arr.min(axis=0), arr.max(axis=0)
            n = 20000
            sample = rng.uniform(lo, hi, size=(n, 3))
            eq = ConvexHull(arr).equations
            inside = np.all(sample @ eq[:, :3].T + eq[:, 3] <= 1e-12, axis=1)
            p = inside.mean()
            box_vol = np.prod(hi - lo)
            sigma = box_vol * np.sqrt(p * (1 - p) / n)
            assert abs(box_vol * p - float(volume(P))) <= 3 * sigma + 1e-12


class TestMinkowski:
    def test_point_translates(self):
        P = hull([(0, 0), (2, 1), (1, 3)])
        assert minkowski_sum(P, hull([(5, -1)])) == translate(P, (5, -1))

    def test_image_plus_simplex(self):
        A = linear_image(LatticeMatrix.diag(2, 3), SIGMA2)
        assert vset(minkowski_sum(A, SIGMA2)) == {(0, 0), (-3, 0), (-1, -3), (0, -4)}

    @given(polytopes(2), polytopes(2))
    def test_commutative(self, P, Q):
        assert minkowski_sum(P, Q) == minkowski_sum(Q, P)

    @given(polytopes(2, 1, 5), polytopes(2, 1, 5), polytopes(2, 1, 5))
    def test_associative(self, P, Q, R):
        assert minkowski_sum(minkowski_sum(P, Q), R) == minkowski_sum(P, minkowski_sum(Q, R))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            minkowski_sum(SIGMA2, standard_simplex(3))


class TestLinearImage:
    def test_identity(self):
        P = hull([(0, 0), (2, 1), (1, 3)])
        assert linear_image(LatticeMatrix.identity(2), P) == P

    def test_diag(self):
        assert vset(linear_image(LatticeMatrix.diag(2, 3), SIGMA2)) == {(0, 0), (-2, 0), (0, -3)}

    def test_minus_identity(self):
        assert vset(linear_image(-LatticeMatrix.identity(2), SIGMA2)) == {(0, 0), (1, 0), (0, 1)}

    def test_rational_matrix(self):
        P = linear_image([[F(1, 2), 0], [0, F(1, 3)]], box([2, 3]))
        assert P == unit_cube(2)

    def test_column_convention(self):
        # A acts on column vectors: e_1 -> first column
        P = linear_image(LatticeMatrix.from_rows([[1, 1], [0, 1]]), segment((0, 0), (0, 1)))
        assert vset(P) == {(0, 0), (1, 1)}


class TestSimplexAndProject:
    def test_simplex_shapes(self):
        assert vset(standard_simplex(1)) == {(0,), (-1,)}
        assert vset(SIGMA2) == {(0, 0), (-1, 0), (0, -1)}

    def test_orthogonal_onto_axis(self):
        assert project(SIGMA2, Subspace.span((1, 0)))[1] == pytest.approx(1)

    def test_parallel_projection(self):
        coords, vol = project(SIGMA2, Subspace.span((0, 1)), Subspace.span((1, 0)))
        assert vol == pytest.approx(1)
        assert sorted(np.abs(coords).ravel().round(12)) == [0, 1]

    def test_simplex3_onto_plane(self):
        _, vol = project(standard_simplex(3), Subspace.span((0, 1, 0), (0, 0, 1)))
        assert vol == pytest.approx(0.5)

    def test_zero_subspace(self):
        assert project(SIGMA2, Subspace(np.zeros((2, 0))))[1] == 1.0

    @given(full_polytopes(3, 6))
    def test_full_space_projection_is_volume(self, P):
        _, vol = project(P, Subspace(np.eye(3)))
        assert vol == pytest.approx(float(volume(P)), rel=1e-9)

    @given(polytopes(2), st.tuples(rationals, rationals))
    def test_translation_invariant(self, P, t):
        H = Subspace.span((1, 2))
        assert project(translate(P, t), H)[1] == pytest.approx(project(P, H)[1], abs=1e-9)


@given(st.lists(st.tuples(*[st.integers(-5, 5)] * 3), min_size=12, max_size=40, unique=True))
def test_insertion_hints_do_not_change_volume(pts):
    from polydyn.polytope import _float_vertex_guess, _placing

    assume(np.linalg.matrix_rank(np.array(pts) - pts[0]) == 3)
    plain, _ = _placing(pts, 3)
    hinted, _ = _placing(pts, 3, _float_vertex_guess(pts))
    assert plain == hinted
