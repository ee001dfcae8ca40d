"""
Entangled coherent state: photon counting against parity
========================================================

Photon counting extracts the full quantum Fisher information of the
phase-averaged state at every phase; parity only does so near phi = 0. The
pure-state value with an external phase reference sits above both.
"""

import math

import numpy as np

from wigmetro import h_ec, h_joo
from wigmetro.cli import fig2_table

alpha = math.sqrt(5)
phis = np.array([1e-4, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 3.0])
columns, residual = fig2_table(alpha, phis)

print(f"H_EC series = {h_ec(alpha):.10f}, with reference beam = {h_joo(alpha):.10f}")
print(f"ensemble truncated at tail mass {residual:.1e}")
print("   phi      DPC        parity")
for phi, dpc, par in zip(phis, columns["cfi_dpc"], columns["cfi_parity"]):
    print(f"{phi:7.4f}  {dpc:.6f}  {par:.6f}")
