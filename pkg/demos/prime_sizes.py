"""
Empirical measures of prime size
================================

An empirical measure with p atoms of mass 1/p can be pushed onto
nu = (delta_-1 + delta_1) / 2 by a map only if 1/2 is a multiple of 1/p.
Along the primes this happens once, so arbitrarily close to any measure
there are measures at which W2^2(., nu) has no derivative.
"""
import numpy as np

from w2lab import canonicalize
from w2lab.differentiability import prime_perturbation_demo, primes_up_to

nu = canonicalize([[-1], [1]])
primes = primes_up_to(30)
samples = np.arange(primes[-1], dtype=float)[:, None]
rep = prime_perturbation_demo(samples, nu, primes, seed=1)
print(" p  mass_feasible  optimal_is_map")
for p, feasible, is_map in rep.rows:
    print(f"{p:>2}  {feasible!s:>13}  {is_map!s:>14}")
print("feasible primes:", rep.feasible_primes)
