"""deg_k(phi^n) / lambda_k^n converges to a constant read off the eigenspaces."""

import math

from polydyn import LatticeMatrix, limit_currents, thmD_validate
from polydyn.algebra import eval_current, gen
from polydyn.dynamics import thmD_constant_report
from polydyn.polytope import standard_simplex

cases = [
    (LatticeMatrix.diag(2, 3), 1),
    (LatticeMatrix.diag(6, 2, 1), 1),
    (LatticeMatrix.diag(2, 3), 2),
    (LatticeMatrix.from_rows([[2, 1], [1, 1]]), 1),
    (LatticeMatrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 0]]), 1),
]

for A, k in cases:
    c = thmD_constant_report(A, k)
    print(f"\nA = {A.tolist()}, k = {k}")
    # k!(d-k)! times the two projected volumes; d! instead would be off by C(d,k)
    print(f"  C = {c.value:.12f}   (with d!: {c.uncorrected:.12f})")
    print(f"  projected volumes {c.vol_unstable:.6f}, {c.vol_transverse:.6f}; splitting condition {c.splitting_condition:.3f}")
    if k < A.d:
        r = thmD_validate(A, k, 12)
        print(f"  deg/lambda^n at n=12: {r.C_empirical:.12f}")
        print("  errors:", " ".join(f"{e:.1e}" for _, e in r.error_sequence))
        print(f"  fitted rate {r.fitted_decay_rate:.4f} vs log kappa {math.log(r.kappa):.4f}")

# the same constant as a pairing of the two limit currents with [Sigma_d]
A = LatticeMatrix.from_rows([[2, 1], [1, 1]])
T_plus, T_minus = limit_currents(A, 1)
S = gen(standard_simplex(2))
print("\n<T-,S><T+,S> =", eval_current(T_minus, S) * eval_current(T_plus, S))
