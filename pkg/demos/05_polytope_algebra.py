"""Working in the polytope algebra: classes, grading, push/pull and currents."""

from fractions import Fraction
from math import comb

from polydyn import LatticeMatrix, box, standard_simplex, unit_cube
from polydyn.algebra import (
    AlgebraElement,
    degree_pairing_matrix,
    dilate,
    eval_current,
    gen,
    graded_part,
    log_class,
    observably_equal,
    pullback,
    pushforward,
    vol_functional,
)
from polydyn.dynamics import invariant_pairing, limit_currents
from polydyn.mixed import mixed_volume_pair

S, Q = standard_simplex(2), box([1, 2])
one = AlgebraElement.one(2)

print(gen(S) * gen(S) == gen(2 * S), dilate(gen(S), 0) == one)

# log[S] = -3/2 + 2[S] - 1/2[2S]; it sits in degree 1
lg = log_class(S)
print(lg)
print(vol_functional(lg), vol_functional(lg * lg))

# graded parts are dilation combinations; they pair to zero unless degrees add to d
M = degree_pairing_matrix(gen(S), gen(Q))
for row in M:
    print(row)
print([M[k][2 - k] == comb(2, k) * mixed_volume_pair(S, Q, k) for k in range(3)])

# equality is tested through a battery of functionals, not symbolically
a = graded_part(gen(S), 1)
b = graded_part(gen(S), 1, probes=[Fraction(1, 2), 3, 7])
print(a == b, observably_equal(a, b))

# pullback inverts pushforward up to |det A|
A = LatticeMatrix.from_rows([[2, 1], [1, 1]])
B = LatticeMatrix.diag(2, 3)
print(pullback(B, pushforward(B, gen(Q))) == 6 * gen(Q))
alpha, beta = gen(S) - 2 * gen(Q), Fraction(1, 2) * gen(Q) + one
print(vol_functional(pullback(A, alpha) * beta), vol_functional(alpha * pushforward(A, beta)))

# Vol(A^n_* alpha . beta) / lambda^n for degree-one parts tends to <T-,alpha><T+,beta>
alpha, beta = graded_part(gen(S), 1), graded_part(gen(unit_cube(2)), 1)
T_plus, T_minus = limit_currents(B, 1)
print("limit:", eval_current(T_minus, alpha) * eval_current(T_plus, beta))
for n in (1, 4, 8, 12, 20, 35):
    print(n, invariant_pairing(B, 1, alpha, beta, n), 1 + (2 / 3) ** n)
