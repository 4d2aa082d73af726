# %% [markdown]
# # Detection performance on the synthetic snapshot model
#
# A 4 x 4 MIMO array looks for a weak object at 30 deg while two interferers
# sit at 40 deg and 10 deg. We compare the Monte Carlo ROC of each detector
# with its closed-form curve, then perturb the interference covariance to see
# which detectors depend on accurate statistics.

# %%
import numpy as np

from mimo_interference import experiments as ex
from mimo_interference.output import emit
from mimo_interference.scenario import load_scenario

cfg = load_scenario("synthetic_reference.json")
print(f"M={cfg.geom.M} N={cfg.geom.N} SNR={cfg.snr_db} dB object at {cfg.object_angle} deg")

# %% Noncentrality parameters order the detectors before any simulation.
for inr in cfg.inr_db:
    lams = {d: cfg.noncentrality(d, inr) for d in ex.ALL_DETECTORS}
    print(f"INR {inr:6.1f} dB  " + "  ".join(f"{d} {v:7.3f}" for d, v in lams.items()))

# %% Monte Carlo vs theory.
curves = ex.run_roc(cfg, ex.ALL_DETECTORS, trials=5000)
for c in curves:
    dev = np.abs(c.pd_empirical - c.pd_theory).max()
    print(f"{c.detector:11s} INR {c.inr_db:6.1f} dB  max |emp - theory| {dev:.3f}  P_D@0.1 {c.pd_at_pfa(0.1):.3f}")

# %% Perturbed interference covariance: LCMV estimates a full matrix, GS only a few EINRs.
pert = ex.run_roc(cfg.with_overrides(sigma2_pert=1.0), ("rs", "lcmv", "gs"), trials=5000, inr_db=-10.0)
base = {c.detector: c.pd_at_pfa(0.1) for c in curves if c.inr_db == -10.0}
for c in pert:
    print(f"{c.detector:5s} P_D@0.1 exact {base[c.detector]:.3f} -> perturbed {c.pd_at_pfa(0.1):.3f}")

# %%
print(emit(curves, "svg", "roc_synthetic.svg"))
