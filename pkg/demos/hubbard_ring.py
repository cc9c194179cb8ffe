#!/usr/bin/env python3
"""Interacting electrons on a ring, solved by exact diagonalization.

Without interaction the orbital-pair entanglement reduces to the finite-ring
tight-binding closed form.  Switching on a strong on-site repulsion changes
the pattern: at half filling only nearest neighbors stay entangled, while at
low filling the electrons prefer to entangle distant orbitals.
"""

import numpy as np

from orbent import (
    HubbardParams,
    TbQuery,
    build_hamiltonian,
    ground_state,
    orbital_pair_entanglement,
    parse_fcidump,
    serialize_fcidump,
    tb_entanglement,
)

L = 6

print("free ring anchor (U = 0, N = 2): exact diagonalization vs closed form")
gs = ground_state(build_hamiltonian(HubbardParams(L, 0.0), 2, 0))
print(f"  ground energy {gs.energy:.9f} (two electrons in the k = 0 mode: -2t*2)")
for d in (1, 2, 3):
    ed_val = orbital_pair_entanglement(gs.state, 0, d, ssr="N").value
    tb_val = tb_entanglement(TbQuery(eta=2 / (2 * L), d=d, n_sites=L)).e_nssr
    print(f"  d={d}: ED {ed_val:.10f}   closed form {tb_val:.10f}")

print("\nstrong repulsion (U = 8):")
for n_elec, label in ((L, "half filling"), (2, "two electrons")):
    gs = ground_state(build_hamiltonian(HubbardParams(L, 8.0), n_elec, 0))
    values = {d: orbital_pair_entanglement(gs.state, 0, d, ssr="N").value
              for d in (1, 2, 3)}
    print(f"  {label} (N={n_elec}, E0={gs.energy:.6f}): "
          + "  ".join(f"E(d={d})={v:.3e}" for d, v in values.items()))
print("  -> half filling entangles only neighbors; the dilute ground state"
      "\n     puts the most entanglement on the farthest pair")

print("\nparity vs number superselection, N = 2, U = 8, farthest pair:")
gs = ground_state(build_hamiltonian(HubbardParams(L, 8.0), 2, 0))
res_n = orbital_pair_entanglement(gs.state, 0, 3, ssr="N")
res_p = orbital_pair_entanglement(gs.state, 0, 3, ssr="P")
print(f"  E_N = {res_n.value:.8f} (closed form)")
print(f"  E_P = {res_p.value:.8f} (minimized numerically, "
      f"certified gap {res_p.gap:.1e})")

print("\nthe same model travels as FCIDUMP text:")
text = serialize_fcidump(HubbardParams(3, 4.0).integrals())
print("  " + "\n  ".join(text.strip().splitlines()))
back = parse_fcidump(text)
print("  parses back identically:", bool(np.array_equal(back.h,
      HubbardParams(3, 4.0).integrals().h)))
