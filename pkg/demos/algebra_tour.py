"""A short tour of the two algebras and the spinor machinery.

Run with:  python3 demos/algebra_tour.py
"""

import numpy as np

from cliffordqm import algebra as alg
from cliffordqm import oracle
from cliffordqm import spinors as sp


def main():
    print("== Cl(0,1): the real home of complex quantum mechanics ==")
    e = alg.Multivector.blade(alg.SCHRODINGER, "e")
    print("e * e =", (e * e).dump().replace("\n", ", "))
    z = 0.6 - 0.8j
    phi = sp.from_wavefunction(z)
    print(f"psi = {z}  ->  R = {phi.R:.6f}, U coefficients = {phi.g}")
    print("round trip:", sp.to_wavefunction(phi))

    print()
    print("== Cl(3,0): the Pauli particle ==")
    for a, b in (("e1", "e2"), ("e2", "e3")):
        ea = alg.Multivector.blade(alg.PAULI, a)
        eb = alg.Multivector.blade(alg.PAULI, b)
        anti = alg.commutator_pm(ea, eb, "+")
        print(f"{{{a},{b}}} = {anti.dump().splitlines()[0]} (anticommute)")
    i = alg.central_unit(alg.PAULI)
    print("central unit e123 squared:", (i * i).scalar_part)

    eps = alg.idempotent(alg.PAULI)
    print("idempotent (1+e3)/2 check:", alg.is_idempotent(eps))

    print()
    print("== spinor -> density element -> matrix bridge ==")
    psi1, psi2 = 0.3 + 0.4j, -0.7 + 0.1j
    spinor = sp.from_components(psi1, psi2)
    rho_c = sp.cde(spinor)
    lhs = oracle.matrix_rep(rho_c.body)
    rhs = oracle.density_matrix(psi1, psi2)
    print("rep(rho_c) vs Psi Psi^dagger max gap:", np.max(np.abs(lhs - rhs)))
    print("algebra trace:", alg.algebra_trace(rho_c.body),
          " rho:", rho_c.rho)

    a, s = sp.spin_vector(spinor)
    print("spin direction a =", a, " |a| =", np.linalg.norm(a))
    print("a3 from components:",
          (abs(psi1) ** 2 - abs(psi2) ** 2) / (abs(psi1) ** 2 + abs(psi2) ** 2))

    print()
    print("== phase blindness ==")
    rotated = sp.phase_rotate(spinor, 1.234)
    gap = (sp.cde(rotated).body - rho_c.body).norm_inf()
    print("CDE change under a phase rotation:", gap)


if __name__ == "__main__":
    main()
