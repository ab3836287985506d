"""
Weak nonlinearity versus free transport
=======================================

For a tiny coupling b = eps^3 the Wigner function of the solution
stays close to the freely transported initial Wigner function, and the
gap shrinks with eps.  A WKB datum with a focusing phase and a much
larger coupling b = eps^(1/2) serves as a control.

Run with ``python demos/transport_sweep.py`` (about ten seconds).
"""

from pathlib import Path

from semiwig.config import load_config
from semiwig.experiments import classify_regime, epsilon_sweep

####################################################################
# The small-coupling experiment
# -----------------------------

here = Path(__file__).resolve().parents[1] / "configs"
cfg = load_config(here / "coherent_small_coupling.cfg")
print("\n".join(classify_regime(cfg).lines()))
res = epsilon_sweep(cfg)
for eps, metric, value, _ in res.rows:
    print(f"{eps:<7} {metric:<24} {value:.4e}")
for v in res.verdicts:
    print(f"[{'PASS' if v.passed else 'FAIL'}] {v.metric}: {v.detail}")

####################################################################
# The control run
# ---------------
# The amplitude is a unit Gaussian and the phase is -x^2/4, so the
# rays cross near t = 1; the mismatch should not decay.

ctrl = load_config(here / "wkb_caustic.cfg")
res = epsilon_sweep(ctrl)
eps, vals = res.values("transport_mismatch_s0")
for e, v in zip(eps, vals):
    print(f"eps={e:<7} FL-inf mismatch {v:.4f}")
fit = res.fits["transport_mismatch_s0"]
print(f"slope {fit.slope:.3f}, trend: {fit.trend}")

####################################################################
# Worker count does not change the rows
# -------------------------------------

two = epsilon_sweep(cfg, jobs=2)
same = [r[:3] for r in two.rows] == [r[:3] for r in epsilon_sweep(cfg).rows]
print("jobs=1 and jobs=2 rows identical:", same)
