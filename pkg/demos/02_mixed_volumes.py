"""Mixed volumes two ways, and where they come from."""

from fractions import Fraction
from math import comb

from polydyn import LatticeMatrix, box, linear_image, scale, segment, standard_simplex, volume
from polydyn.mixed import (
    box_mixed_volume,
    mixed_volume,
    mixed_volume_polarization,
    mixed_volumes_pair_all,
    steiner_coefficients,
)

S = standard_simplex(2)
AS = linear_image(LatticeMatrix.diag(2, 3), S)

# Vol(t AS + S) is a polynomial in t; its coefficients are C(2,k) V(AS[k], S[2-k])
c = steiner_coefficients(AS, S)
print("Vol(t AS + S) coefficients:", c)
V = mixed_volumes_pair_all(AS, S)
print("mixed volumes:", V)
assert all(c[k] == comb(2, k) * V[k] for k in range(3))

# inclusion-exclusion over Minkowski sums gives the same numbers
print([mixed_volume_polarization(AS, S, k) for k in range(3)])

for t in range(4):
    print(t, volume(scale(AS, t) + S), sum(comb(2, k) * t**k * V[k] for k in range(3)))

# boxes have a closed form
r, s = [2, 3], [1, 1]
print(mixed_volumes_pair_all(box(r), box(s))[1], box_mixed_volume(r, s, 1))

# three coordinate segments in R^3: Vol(r1 K1 + r2 K2 + r3 K3) = r1 r2 r3
K = [segment((0, 0, 0), e) for e in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]]
print(mixed_volume(K, [1, 1, 1]))  # 1/6 with the multinomial normalization

# a segment K in span{e2} against S: half of Vol(K) * Vol(projection of S)
n = 3
print(mixed_volumes_pair_all(segment((0, 0), (0, -(3**n))), S)[1], Fraction(3**n, 2))
