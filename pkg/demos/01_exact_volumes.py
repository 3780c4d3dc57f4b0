"""Exact hulls and volumes of rational polytopes."""

from fractions import Fraction

from polydyn import LatticeMatrix, hull, linear_image, minkowski_sum, standard_simplex, unit_cube, volume

# the standard simplex conv(0, -e_1, ..., -e_d) has volume 1/d!
for d in range(1, 7):
    print(d, volume(standard_simplex(d)))

S = standard_simplex(2)
print(S.vertices)

# interior points are dropped, vertices come back in lexicographic order
P = hull([(0, 0), (1, 0), (0, 1), (Fraction(1, 4), Fraction(1, 4))])
print(P.vertices)

# S + (-S) is a hexagon of area 3
H = minkowski_sum(S, -S)
print(len(H.vertices), volume(H))

# x -> A x with A = diag(2, 3), then add S back
A = LatticeMatrix.diag(2, 3)
AS = linear_image(A, S)
print(AS.vertices)
print(minkowski_sum(AS, S).vertices, volume(minkowski_sum(AS, S)))  # area 13/2

# lower-dimensional input is fine, it just has volume 0
print(volume(hull([(0, 0), (3, 1)])))
print(volume(unit_cube(4)), volume(linear_image(LatticeMatrix.from_rows([[2, 1], [1, 1]]), unit_cube(2))))
