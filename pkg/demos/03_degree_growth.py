"""Degree sequences of monomial maps against their spectral prediction."""

import math

from polydyn import LatticeMatrix, degree_table, dynamical_degrees, entropy, exterior_power, mat_pow, resonance, sup_norm

maps = {
    "(x^2, y^3)": LatticeMatrix.diag(2, 3),
    "(x, xy)": LatticeMatrix.from_rows([[1, 1], [0, 1]]),
    "cat map": LatticeMatrix.from_rows([[2, 1], [1, 1]]),
    "cremona": -LatticeMatrix.identity(3),
    "3d": LatticeMatrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 0]]),
}

for name, A in maps.items():
    t = degree_table(A, range(1, A.d + 1), 8)
    lam = dynamical_degrees(A)
    print(f"\n{name}  A = {A.tolist()}")
    print("  lambda =", [round(x, 6) for x in lam], " entropy =", round(entropy(A), 6))
    for k in t.k_values:
        row = t.row(k)
        print(f"  k={k}:", [int(x) for x in row])
        # n-th roots creep towards lambda_k; polynomial factors make it slow
        print("        deg^(1/n):", [round(float(x) ** (1 / n), 3) for n, x in zip(t.n_values, row)])
        # deg_k stays within a constant factor of the norm of wedge^k A^n
        ratios = [float(x) / sup_norm(exterior_power(mat_pow(A, n), k)) for n, x in zip(t.n_values, row)]
        print("        deg / ||wedge^k A^n||:", [round(r, 3) for r in ratios])
    for k in range(1, A.d):
        kappa, strict = resonance(A, k)
        print(f"  kappa_{k} = {kappa:.4f}", "" if strict else "(resonant)")

# log-concavity in k holds exactly at every n
A = maps["3d"]
t = degree_table(A, range(0, 4), 8)
print(all(t[k, n] ** 2 >= t[k - 1, n] * t[k + 1, n] for n in t.n_values for k in (1, 2)))
print(math.log(dynamical_degrees(A)[1]))
