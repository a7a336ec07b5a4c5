"""
A chain where G~ is unbounded in L^p while H stays bounded
==========================================================

Two copies of a path of length n, with rate 1 between the pair at each end
and rate alpha_n in the middle.  Its second eigenfunction concentrates the
energy of G~ in a way that H cannot see.
"""
import numpy as np

from jumpform import brown
from jumpform.squarefns import evaluate

# The n = 2 chain and its eigenpair.
chain, b = brown.build_brown_chain(2)
print("alpha_2      ", brown.alpha(2))
print("lambda_2     ", b.lambda_n)
print("f            ", np.round(b.f, 6))
print("|Af + lf|    ", brown.verify_eigenpair(chain, b))

# G~^2 from spectral closed forms, from quadrature, and the uncorrected formula.
ev = evaluate(chain.spec, chain.kernel, b.f, "G_tilde", method="both")
print("\nG~^2 spectral  ", ev.sq)
print("G~^2 quadrature", ev.quad.value)
print("closed form    ", brown.closed_form_G_tilde_sq(2))
print("uncorrected    ", brown.uncorrected_G_tilde_sq(2))

# Only one of the last two can be right: at p = 2 the squared norm of G~ is
# half the squared norm of f.
print("\n||f||^2 / 2           ", np.sum(b.f**2) / 2)
print("sum closed form       ", brown.closed_form_G_tilde_sq(2).sum())
print("sum uncorrected       ", brown.uncorrected_G_tilde_sq(2).sum())

# The ratio ||G~||_4 / ||f||_4 grows like n^(1/4); H does not move.
print("\n   n   ratio G~   ratio/n^1/4   ratio H")
for row in brown.ratio_scan(4.0, [8, 16, 32, 64, 128, 256]):
    print(f"{row.n:4d}   {row.ratio_G_tilde:8.4f}   {row.normalized:11.6f}   {row.ratio_H:7.4f}")
print("target limit of ratio/n^1/4:", brown.asymptotic_constant(4.0))
print("1/sqrt(2) of that:             ", brown.asymptotic_constant(4.0) / np.sqrt(2))
