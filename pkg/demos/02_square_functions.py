"""
Square functions and the Hardy-Stein identity on a random chain
===============================================================
"""
import numpy as np

from jumpform import hardy_stein_check, random_chain, random_field, square_function_report

chain = random_chain(12, seed=4)
f = random_field(chain, seed=4, mean_zero=True)
print("spectral gap", chain.spec.gap, " lambda_max", chain.spec.lambda_max)

# All four square functions at once, with their L^p norms.
rep = square_function_report(chain.spec, chain.kernel, f, [1.5, 2.0, 4.0])
print("\nstate        G   G_tilde         H   H_tilde")
for i in range(chain.n):
    print(f"{i:5d}" + "".join(f"{rep.values(k)[i]:10.5f}" for k in ("G", "G_tilde", "H", "H_tilde")))
print("\nmethods", rep.method)

# At p = 2 every norm equals ||f||_2 / sqrt 2 for a mean-zero f.
target = np.sqrt(np.sum(f**2 * chain.m) / 2)
for p, norms in rep.p_norms.items():
    print(f"p={p}: " + "  ".join(f"{k}={v:.6f}" for k, v in norms.items()), "(target)" if p == 2 else "")
print("||f||_2/sqrt 2 =", target)

# Hardy-Stein: ||f||_p^p against the time integral of the Bregman energy.
for p in (1.5, 3.0):
    r = hardy_stein_check(chain, f, p)
    print(f"\nHardy-Stein p={p}: lhs {r.lhs:.12f}  rhs {r.rhs:.12f}  rel err {r.rel_err:.1e}")
