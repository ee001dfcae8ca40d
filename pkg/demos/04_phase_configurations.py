"""
Where the phase shift sits matters only with a phase reference
==============================================================

Shifting one arm (N/2 + J_z) or both arms symmetrically (J_z) gives different
pure-state QFIs, but once coherence between photon-number sectors is removed
the two agree exactly.
"""

import math

from wigmetro import PhaseConfig, ec_pure_state, generator_moments, phase_average, qfi_ensemble, qfi_pure

single, balanced = PhaseConfig.SINGLE_ARM, PhaseConfig.BALANCED

for alpha in (0.5, 1.0, math.sqrt(5), 3.0):
    psi = ec_pure_state(alpha)
    h1, h2 = qfi_pure(psi, single).value, qfi_pure(psi, balanced).value
    mom = generator_moments(psi, single)
    # 4 Var(N/2 + J_z) - 4 Var(J_z) = Var(N) + 4 Cov(N, J_z)
    extra = mom.var_N + 4 * mom.cov_N_Jz
    ens = phase_average(psi)
    print(f"alpha={alpha:.3f}  H1={h1:9.4f}  H2={h2:9.4f}  H1-H2={h1 - h2:7.4f} "
          f"(Var N + 4 Cov = {extra:7.4f})  averaged: {qfi_ensemble(ens, single).value:9.4f} "
          f"/ {qfi_ensemble(ens, balanced).value:9.4f}")
