"""
Maximum likelihood saturates the Cramer-Rao bound
=================================================

Simulate nu photon-counting shots, estimate the phase by maximum likelihood
and repeat. The spread of the estimates approaches 1 / (nu F).
"""

import math

from wigmetro import PhaseConfig, crb_report, ec_ensemble, noon

for name, probe in (("NOON(2)", noon(2)), ("EC(sqrt 5)", ec_ensemble(math.sqrt(5)))):
    for nu in (1_000, 10_000):
        rep = crb_report(probe, PhaseConfig.SINGLE_ARM, 0.3, nu, 200, seed=1)
        print(f"{name:11s} nu={nu:6d}  F={rep.fisher:8.4f}  var={rep.empirical_variance:.3e}  "
              f"CRB={rep.crb:.3e}  ratio={rep.ratio:.3f}  bias={rep.bias:+.1e}")
