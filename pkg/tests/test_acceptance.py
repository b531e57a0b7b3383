"""Acceptance criteria, each with its tolerance and wall-time budget.

Run under pytest, or directly with ``python3 tests/test_acceptance.py`` for
the summary table alone. Every criterion prints one PASS/FAIL line.
"""
import sys
import time

import numpy as np
import pytest

from surfhol.fields import constant_two_form, landau_connection, zero_connection
from surfhol.liecore import CROSSED_MODULES, crossed_module, crossed_module_check, frob
from surfhol.pathspace import Arc, TangentField, lift_tangent_field, omega_eval, path_holonomy
from surfhol.plaquette import (
    central_twist, compose_h, compose_v, identity_h, identity_v, interchange_check, inverse_h,
    inverse_v, plaquette_distance, quasi_flat_closure_check, random_plaquette, random_quasi_flat,
    random_window,
)
from surfhol.quadrature import loglog_slope
from surfhol.scenario import RUNNERS, load_scenario_text, parse_scenario, shipped_scenarios
from surfhol.surface import IdentitySquare, surface_holonomy, verify_tgb

N_LIST = [50, 100, 200, 400]
MODULES = sorted(CROSSED_MODULES)
# order-2 methods measure 1.9999 on these fields; the floor leaves room for that
MIN_ORDER = 1.95


def scenario(name, n=None):
    return parse_scenario(load_scenario_text(name), n_override=n)


def run(name, task, n=None):
    return RUNNERS[task](scenario(name, n))


def headline(name, task, n=None):
    return float(next(iter(run(name, task, n).values())))


def slope(name, task):
    return loglog_slope(N_LIST, [headline(name, task, n) for n in N_LIST])


# ----------------------------------------------------------------------------
# criteria; each returns (passed, detail)


def c01_crossed_modules():
    worst = max(crossed_module_check(crossed_module(n), 1000, seed=0).max_residual for n in MODULES)
    return worst < 1e-9, f"max identity residual {worst:.2e} over {len(MODULES)} modules"


def c02_stokes():
    res = {n: headline(n, "stokes") for n in ("landau", "su2-poly")}
    slopes = {n: slope(n, "stokes") for n in res}
    ok = all(r < 1e-6 for r in res.values()) and all(abs(p - 2) < 0.2 for p in slopes.values())
    return ok, " ".join(f"{n}: {res[n]:.2e} slope {slopes[n]:.3f}" for n in res)


def c03_omega_axioms():
    cm = crossed_module("su2-conj")
    Z = zero_connection(cm.G)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(200)
    lift = path_holonomy(Z, gamma)
    X = cm.G.random_algebra(np.random.default_rng(0))
    vt = lift_tangent_field(Z, lift, TangentField(gamma, np.zeros_like(gamma.points)), X)
    flat = float(frob(omega_eval(Z, Z, constant_two_form(cm.H, cm.H.basis[0]), cm, lift, vt) - X))
    rows = [run(n, "omega-axioms") for n in shipped_scenarios()]
    gen = max(r["vertical_generator"] for r in rows)
    equi = max(r["equivariance"] for r in rows)
    ok = flat == 0 and gen < 1e-12 and equi < 1e-10
    return ok, f"flat generator {flat:.1e}, curved generator {gen:.1e}, equivariance {equi:.2e}"


def c04_omega_lift():
    rows = {n: run(n, "omega-lift") for n in shipped_scenarios()}
    omega = max(r["omega"] for r in rows.values())
    cross = max(r["forward_form"] for r in rows.values())
    return omega < 1e-8 and cross < 1e-8, f"|omega(lift)| {omega:.2e}, cross-form {cross:.2e}"


def c05_biholonomy():
    worst = max(headline(n, "biholonomy") for n in shipped_scenarios())
    return worst < 1e-8, f"closed form vs loop {worst:.2e}"


def c06_tgb():
    cm = crossed_module("u1-abelian")
    b1, b2, bc = 0.4, 0.9, 0.3
    rep = verify_tgb(landau_connection(cm.G, b1), landau_connection(cm.G, b2),
                     constant_two_form(cm.H, [[1j * bc]]), cm, IdentitySquare().sample(200, 200))
    exact = np.exp(-1j * (b2 + bc))
    lhs = abs(rep.c[-1, 0, 0] - exact)
    rhs = abs((rep.a0[-1] @ rep.g[-1] @ cm.tau(rep.h0[-1]))[0, 0] - exact)
    abelian = max(lhs, rhs, rep.residual)
    su2 = headline("su2-poly", "tgb")
    order = slope("su2-poly", "tgb")
    ok = abelian < 1e-6 and su2 < 1e-5 and order >= MIN_ORDER
    return ok, f"abelian {abelian:.2e}, su2-poly {su2:.2e} slope {order:.3f}"


def c07_ptev1a():
    res = max(headline(n, "ptev1a") for n in ("su2-poly", "so3-on-r3"))
    order = slope("su2-poly", "ptev1a")
    return res < 1e-5 and order >= MIN_ORDER, f"residual {res:.2e}, slope {order:.3f}"


def negative_control_text():
    text = load_scenario_text("su2-fakeflat-ii")
    text = text.replace('[fields.B]\nfamily = "flatting"',
                        '[fields.B]\nfamily = "flatting-perturbed"\noffset = [0.1, 0.0, 0.0]')
    return text.replace('mode = "ii"', 'mode = "ii"\nenforce_conditions = false')


def c08_reparam():
    res = {n: headline(n, "reparam") for n in ("su2-fakeflat-i", "su2-fakeflat-ii", "constant-path")}
    modes = {n: scenario(n).reparam.mode for n in res}
    neg = float(RUNNERS["reparam"](parse_scenario(negative_control_text()))["max"])
    ok = all(r < 1e-5 for r in res.values()) and neg > 1e-2 and modes["su2-fakeflat-i"] == "i" \
        and modes["su2-fakeflat-ii"] == "ii"
    detail = " ".join(f"{n}({modes[n]}): {r:.1e}" for n, r in res.items())
    return ok, f"{detail}, perturbed-B control {neg:.2e}"


def c09_plaquette_laws():
    worst = 0.0
    for name in MODULES:
        cm = crossed_module(name)
        rng = np.random.default_rng(1)
        m = random_plaquette(cm, rng, size=1000)
        m2 = random_plaquette(cm, rng, size=1000, a=m.c)
        m3 = random_plaquette(cm, rng, size=1000, a=m2.c)
        k = random_plaquette(cm, rng, size=1000, d=m.b)
        k2 = random_plaquette(cm, rng, size=1000, d=k.b)
        worst = max(
            worst,
            plaquette_distance(compose_v(compose_v(m, m2), m3), compose_v(m, compose_v(m2, m3))),
            plaquette_distance(compose_h(compose_h(m, k), k2), compose_h(m, compose_h(k, k2))),
            plaquette_distance(compose_v(identity_v(m.a, cm), m), m),
            plaquette_distance(compose_v(m, identity_v(m.c, cm)), m),
            plaquette_distance(compose_h(identity_h(m.d, cm), m), m),
            plaquette_distance(compose_h(m, identity_h(m.b, cm)), m),
            plaquette_distance(compose_v(m, inverse_v(m)), identity_v(m.a, cm)),
            plaquette_distance(compose_v(inverse_v(m), m), identity_v(m.c, cm)),
            plaquette_distance(compose_h(m, inverse_h(m)), identity_h(m.d, cm)),
            plaquette_distance(compose_h(inverse_h(m), m), identity_h(m.b, cm)),
        )
    return worst < 1e-12, f"max law residual {worst:.2e}"


def c10_closure():
    worst, twisted = 0.0, []
    for name in MODULES:
        cm = crossed_module(name)
        rng = np.random.default_rng(2)
        z = central_twist(cm)
        if z is not None:
            twisted.append(name)
        for zz in (None,) if z is None else (None, np.broadcast_to(z, (1000,) + z.shape)):
            q = random_quasi_flat(cm, rng, z=zz, size=1000)
            qv = random_quasi_flat(cm, rng, z=zz, size=1000, a=q.c)
            qh = random_quasi_flat(cm, rng, z=zz, size=1000, d=q.b)
            worst = max(worst, quasi_flat_closure_check(q, qv, "V"), quasi_flat_closure_check(q, qh, "H"))
    return worst < 1e-9 and len(twisted) > 0, f"max closure {worst:.2e}, twisted on {','.join(twisted)}"


def c11_interchange():
    rep = interchange_check(*random_window(crossed_module("su2-so3"), np.random.default_rng(3), size=500))
    ok = rep.boundary < 1e-12 and rep.tau_residual < 1e-10
    return ok, f"boundary {rep.boundary:.1e}, tau {rep.tau_residual:.2e}, raw h gap {rep.h_difference:.2e}"


def c12_bridge():
    names = [n for n in shipped_scenarios() if "bridge" in scenario(n).tasks]
    rows = {n: run(n, "bridge") for n in names}
    qf = max(r["quasi_flat"] for r in rows.values())
    paste = max(r["half_pasting"] for r in rows.values())
    ok = "su2-fakeflat-i" in rows and qf < 1e-5 and paste < 1e-4
    return ok, f"quasi-flat {qf:.2e}, half pasting {paste:.2e} on {len(rows)} scenarios"


def c13_abelian_closed_form():
    sc = scenario("abelian-constant-b")
    b = 0.7
    grid = IdentitySquare().sample(200, 200)
    h0 = surface_holonomy(sc.Abar, sc.A, sc.B, sc.cm, grid)
    err = abs(h0[-1, 0, 0] / np.exp(-1j * b) - 1)
    return err < 1e-7, f"relative error {err:.2e}"


CRITERIA = [
    (1, "crossed-module identities", c01_crossed_modules, 1.0),
    (2, "non-abelian Stokes", c02_stokes, 5.0),
    (3, "connection axioms", c03_omega_axioms, 1.0),
    (4, "horizontal lift of omega", c04_omega_lift, 5.0),
    (5, "bi-holonomy closed form", c05_biholonomy, 5.0),
    (6, "surface transport theorem", c06_tgb, 30.0),
    (7, "endpoint transport", c07_ptev1a, 10.0),
    (8, "reparametrization invariance", c08_reparam, 30.0),
    (9, "double-category laws", c09_plaquette_laws, 2.0),
    (10, "quasi-flat closure", c10_closure, 2.0),
    (11, "interchange up to tau", c11_interchange, 2.0),
    (12, "continuum-discrete bridge", c12_bridge, 30.0),
    (13, "abelian closed forms", c13_abelian_closed_form, 2.0),
]


def evaluate(fn, budget):
    t0 = time.perf_counter()
    ok, detail = fn()
    wall = time.perf_counter() - t0
    return bool(ok) and wall < budget, f"{detail} [{wall:.2f}s of {budget:.0f}s]"


def line(num, title, ok, detail):
    return f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.mark.parametrize("num,title,fn,budget", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, fn, budget, capsys):
    ok, detail = evaluate(fn, budget)
    with capsys.disabled():
        print("\n" + line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [(num, title, *evaluate(fn, budget)) for num, title, fn, budget in CRITERIA]
    for num, title, ok, detail in results:
        print(line(num, title, ok, detail))
    sys.exit(0 if all(r[2] for r in results) else 1)
