# %% [markdown]
# # When the incoherent interference model collapses to familiar forms
#
# The general model allows an interferer with its own chirp, PRI, codes and
# timing offset. Three configurations reduce it to something simpler:
# a synchronized copy of the victim behaves like an object, all-ones codes
# give a phased-array (m-independent) response, and TDM codes keep the
# decoded snapshot rank one. Each validator runs the full simulation and
# compares against the reduced closed form.

# %%
import numpy as np

from mimo_interference.reductions import SpecialCase, special_case_scenario, validate_special_case

rng = np.random.default_rng(0)
for mode in SpecialCase:
    for K in (16, 64):
        rep = validate_special_case(mode, special_case_scenario(mode, K, rng))
        print(f"{mode.value:9s} K={K:3d}  max relative deviation {rep.max_rel_deviation:.2e}  bins {rep.bins}")

# %% Breaking a precondition is reported, not silently approximated.
import dataclasses

from mimo_interference.errors import ConfigError

sc = special_case_scenario(SpecialCase.COHERENT, 16)
try:
    validate_special_case("COHERENT", dataclasses.replace(sc, intf=dataclasses.replace(sc.intf, tau_syn=2e-6)))
except ConfigError as exc:
    print("rejected:", exc)
