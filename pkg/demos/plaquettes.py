"""Plaquettes over SU(2) -> SO(3): interchange and the continuum bridge.

Random quasi-flat windows satisfy the interchange law up to tau; plaquettes
built from a fake-flat surface transport are quasi-flat and paste along a
shared edge.
"""
import numpy as np

from surfhol.liecore import crossed_module
from surfhol.plaquette import interchange_check, random_window
from surfhol.scenario import RUNNERS, load_scenario_text, parse_scenario

cm = crossed_module("su2-so3")
rep = interchange_check(*random_window(cm, np.random.default_rng(0), size=500))
print(f"interchange over 500 windows: boundary {rep.boundary:.1e}, tau residual {rep.tau_residual:.1e}")

for name in ("abelian-square", "su2-fakeflat-i", "su2-so3"):
    out = RUNNERS["bridge"](parse_scenario(load_scenario_text(name)))
    print(f"{name:15s} quasi-flat residual {out['quasi_flat']:.2e}  half pasting {out['half_pasting']:.2e}")
