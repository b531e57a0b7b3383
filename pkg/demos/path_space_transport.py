"""Path-space connection on a random su(2) polynomial background.

Lifts a path, checks the Stokes identity for a variation field, and shows
that omega on its own horizontal lift vanishes while the residuals shrink
like N^-2.
"""
import numpy as np

from surfhol.fields import poly2_two_form, random_poly2_connection
from surfhol.liecore import crossed_module, frob
from surfhol.pathspace import (
    Segment, VectorFieldMap, omega_eval, omega_horizontal_lift, path_holonomy, stokes_residual,
    tangent_field_from_variation,
)
from surfhol.quadrature import loglog_slope

cm = crossed_module("su2-conj")
rng = np.random.default_rng(7)
Abar = random_poly2_connection(cm.G, rng, 0.2)
A = random_poly2_connection(cm.G, rng, 0.2)
coeffs = cm.H.from_coeffs(0.2 * rng.standard_normal((3, 3)))
B = poly2_two_form(cm.H, coeffs[0], coeffs[1:3])

path = Segment([0, 0], [1, 0.5])
field = VectorFieldMap.linear([0, 0.3], [0.2, 0.1])

print("  N   stokes residual   |omega(horizontal lift)|")
ns, res = [50, 100, 200, 400], []
for n in ns:
    gamma = path.sample(n)
    vt = tangent_field_from_variation(Abar, gamma, field.sample(gamma))
    res.append(stokes_residual(Abar, vt.along, vt))
    lift = path_holonomy(Abar, gamma)
    hl = omega_horizontal_lift(A, Abar, B, cm, lift, field.sample(gamma))
    print(f"{n:4d}   {res[-1]:.3e}         {frob(omega_eval(A, Abar, B, cm, lift, hl)):.1e}")
print(f"observed order {loglog_slope(ns, res):.3f}")
