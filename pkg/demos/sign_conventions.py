"""
Why the signs matter
====================

The differential on A∞-prenatural transformations squares to zero only with
consistent Koszul signs.  Compare the shipped exponents with the literal ones
on random transformations of nonzero degree, then scan the family of
composition signs against the derivation law.
"""

import itertools

from ainfqi.generate import InstanceSpec, generate_equivalence, rng_for
from ainfqi.selftest import check_derivation, check_units
from ainfqi.transform import KOSZUL, LITERAL, CompositionSign, d_infty, random_transformation

e = generate_equivalence(InstanceSpec(seed=31, objects=2))
rng = rng_for(31, 1)
for n in (-1, 0, 1):
    t = random_transformation(e.F, e.G, n, 3, rng)
    print(f"degree {n:+d}: koszul d∞²=0 {d_infty(d_infty(t, KOSZUL), KOSZUL).is_zero()}, "
          f"literal d∞²=0 {d_infty(d_infty(t, LITERAL), LITERAL).is_zero()}")

# ε(k) = (−1)^{|ξ|·Σ(|u_i| − c1) + c2|θ| + c3}
for c in itertools.product((0, 1), repeat=3):
    sign = CompositionSign(*c)
    ok = [check_derivation(e.F, e.G, rng_for(31, 9), 3, sign), check_units(e.F, e.G, rng_for(31, 9), 3, sign)]
    print(c, "derivation:", ok[0], " units:", ok[1])
