"""
Quasi-inverses of random equivalences
=====================================

Generate a seeded objectwise homotopy equivalence between dg-categories, run
the inductive construction up to arity 4 and look at how each step was
solved.  ``audit=True`` also solves every step with the independent linear
oracle.
"""

import collections

from ainfqi.generate import InstanceSpec, generate_equivalence
from ainfqi.quasi_inverse import quasi_inverse

spec = InstanceSpec(seed=2718, objects=2, max_generators=2, field="f:10007")
e = generate_equivalence(spec)
print("C objects:", e.C.objects, " D objects:", e.D.objects)
print("hom dims in D:", {k: v.dim for k, v in e.D.homs.items() if v.dim})

cert = quasi_inverse(e.C, e.F, e.G, e.phi, 4, audit=True)

# Each step records which closed formula was accepted and whether the oracle
# found a solution as well.
for s in cert.steps:
    print(f"{s.side:7s} m={s.m}  Ψ: {s.psi_source:8s} homotopy: {s.eta_source:9s} "
          f"nonzero λ/μ: {s.nonzero_lambda}/{s.nonzero_mu}  oracle ok: {s.oracle_ok}")

sizes = collections.Counter(len(idxs) for _, idxs in cert.psi.table)
print("Ψ entries per arity:", dict(sorted(sizes.items())))
print("certificate verifies:", cert.report.ok)

# Over a few more seeds, how often does the verbatim homotopy formula work?
tally = collections.Counter()
for seed in range(10):
    e = generate_equivalence(InstanceSpec(seed=seed, objects=2))
    c = quasi_inverse(e.C, e.F, e.G, e.phi, 3, audit=False)
    tally.update(s.eta_source for s in c.steps if s.side == "forward")
print("accepted homotopy formulas:", dict(tally))
