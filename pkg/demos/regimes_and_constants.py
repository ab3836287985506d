"""
Smallness regimes and the Gagliardo-Nirenberg constant
======================================================

The focusing alternative compares |b| eps^{-n sigma} with a threshold
built from the sharp Gagliardo-Nirenberg constant.  We estimate that
constant over sech-power and Gaussian profiles, then classify a few
coupling schedules.

Run with ``python demos/regimes_and_constants.py``.
"""

import numpy as np

from semiwig.bounds import gn_constant_estimate
from semiwig.config import RegimeConfig
from semiwig.experiments import classify_regime

####################################################################
# Constant estimates
# ------------------
# For n = 1, sigma = 1 the maximizer is sech and the ratio is 1/sqrt(3).

for n, sigma in ((1, 1.0), (1, 0.5), (2, 0.5), (2, 1.0)):
    est = gn_constant_estimate(n, sigma)
    print(
        f"n={n} sigma={sigma:<4} C*>={est.value:.5f} ({est.family}, p={est.power:.3f}); "
        f"best Gaussian {est.gaussian:.5f}"
    )
print(f"1/sqrt(3) = {1 / np.sqrt(3):.5f}")

####################################################################
# A few schedules
# ---------------

cases = [
    RegimeConfig(exponent=0.5, focusing=False),
    RegimeConfig(exponent=1.2, focusing=True),
    RegimeConfig(exponent=2.5, focusing=False),
    RegimeConfig(n=3, sigma=1.0, exponent=2.0, focusing=False),
]
for cfg in cases:
    print()
    print("\n".join(classify_regime(cfg).lines()))
