"""
A quasi-inverse you can check by hand
=====================================

The point category maps to the contractible complex ``A = (e0 → e1)`` and to
the zero object ``O``.  Both functors are objectwise homotopy equivalent, so
the zero map between them has an A∞ quasi-inverse.
"""

from ainfqi.fixtures import contract_bundle
from ainfqi.quasi_inverse import quasi_inverse, solve_homotopy_system

b = contract_bundle()
phi = b.phi
D = phi.D
print(D.hom("A", "A").space)

# The homotopy system: Ψ: O → A and p on O are forced to vanish, while h must
# satisfy d(h) = ΨΦ − id = −id_A.  The solver finds h = h_A, i.e. h(e1) = −e0.
sys = solve_homotopy_system(phi.C, phi.source, phi.target, phi)
print("Ψ =", sys.psi, " h =", sys.h, " p =", sys.p)

# Every obstruction vanishes, so the construction stops at η⁰ = h.
cert = quasi_inverse(phi.C, phi.source, phi.target, phi, 4)
print("Ψ zero:", cert.psi.is_zero(), " ω zero:", cert.omega.is_zero())
print("η entries:", cert.eta.table)
for check in cert.report.checks:
    if check.arity == cert.arity:
        print(f"{check.identity:16s} ok up to arity {check.arity}: {check.ok}")
