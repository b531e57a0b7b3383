"""Declarative scenarios: parse a TOML config, build fields and geometry, run tasks.

Everything that can fail on bad input (syntax, unknown task or family, bad
grid sizes, non-positive tolerances) fails while the scenario is being built,
before any task runs.
"""
from __future__ import annotations

import re
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from . import __version__
from .errors import ConfigParse, SurfholError, UnknownFamily, UnknownTask
from .fields import (
    ConnectionField, affine_connection, constant_connection, constant_two_form, landau_connection,
    make_flatting_B, poly2_connection, poly2_two_form, random_poly2_connection, zero_connection,
    zero_two_form,
)
from .liecore import CROSSED_MODULES, crossed_module, crossed_module_check, frob
from .pathspace import (
    Arc, CubicBezier, Segment, SplinePath, TangentField, VectorFieldMap, half_path_difference,
    lift_tangent_field, omega_curvature_direct, omega_curvature_eval, omega_eval,
    omega_horizontal_lift, path_holonomy, sigma_lift_tangent_field, stokes_residual,
    tangent_field_from_variation,
)
from .plaquette import (
    central_twist, compose_h, compose_v, from_transport, identity_h, identity_v, interchange_check,
    inverse_h, inverse_v, is_quasi_flat, plaquette_distance, quasi_flat_closure_check,
    random_plaquette, random_quasi_flat, random_window, tau_distance,
)
from .quadrature import loglog_slope
from .surface import (
    AffineSurface, ConstantPathSurface, IdentitySquare, Reparametrization, SplineSurface,
    SweepSurface, WarpSurface, biholonomy_closed_form, biholonomy_right_edge,
    edge_transport, ev1_transport_check, half_surface_difference, surface_holonomy, surface_lift,
    theta_transport, verify_reparam, verify_tgb,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_TOLERANCES = {
    "tol_group": 1e-9,
    "tol_alg": 1e-9,
    "tol_cm": 1e-9,
    "tol_ode": 1e-6,
    "tol_stokes": 1e-6,
    "tol_cross": 1e-8,
    "tol_axiom": 1e-10,
    "tol_curv": 1e-4,
    "tol_thm": 1e-5,
    "tol_cat": 1e-10,
    "tol_bridge": 1e-4,
}

# task name -> tolerance key (None: demonstration, always passes)
TASKS = {
    "check-cm": "tol_cm",
    "transport-path": "tol_group",
    "transport-surface": "tol_group",
    "biholonomy": "tol_cross",
    "stokes": "tol_stokes",
    "omega-axioms": "tol_axiom",
    "omega-lift": "tol_cross",
    "curvature": "tol_curv",
    "tgb": "tol_thm",
    "ptev1a": "tol_thm",
    "theta-transport": "tol_thm",
    "reparam": "tol_thm",
    "plaquette": "tol_cat",
    "bridge": "tol_bridge",
    "halfpath": None,
}

# tasks whose residual is a discretization error and can be fitted against N
CONVERGENT_TASKS = ("stokes", "tgb", "ptev1a", "theta-transport", "curvature")

TOP_KEYS = {"name", "crossed_module", "seed", "tasks", "fields", "geometry", "reparametrization",
            "numerics", "description"}


# ----------------------------------------------------------------------------
# parsing helpers


def _line_of(text, *needles):
    """1-based line of the first line containing every needle, if any."""
    if text is None:
        return None
    for k, line in enumerate(text.splitlines(), 1):
        if all(n in line for n in needles):
            return k
    return None


class _Ctx:
    def __init__(self, text):
        self.text = text

    def error(self, cls, message, field, *needles):
        return cls(message, field=field, line=_line_of(self.text, *needles) if needles else None)

    def get(self, table, key, path, default=None, kind=None, required=False):
        if key not in table:
            if required:
                raise self.error(ConfigParse, f"missing key {key!r}", f"{path}.{key}")
            return default
        value = table[key]
        if kind is not None and not isinstance(value, kind):
            raise self.error(ConfigParse, f"{path}.{key} has wrong type {type(value).__name__}",
                             f"{path}.{key}", key)
        return value

    def vector(self, table, key, path, length, default=None):
        value = self.get(table, key, path, default)
        try:
            arr = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            raise self.error(ConfigParse, f"{path}.{key} must be numeric", f"{path}.{key}", key) from None
        if length is not None and arr.shape != (length,):
            raise self.error(ConfigParse, f"{path}.{key} must have {length} entries",
                             f"{path}.{key}", key)
        return arr


def _coeff_array(ctx, table, key, path, shape, group):
    """Algebra coefficients of shape ``shape + (dim,)`` mapped to matrices."""
    value = table.get(key)
    if value is None:
        return None
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ctx.error(ConfigParse, f"{path}.{key} must be numeric", f"{path}.{key}", key) from None
    want = tuple(shape) + (group.dim,)
    if arr.shape != want:
        raise ctx.error(ConfigParse, f"{path}.{key} must have shape {list(want)}, got {list(arr.shape)}",
                        f"{path}.{key}", key)
    return group.from_coeffs(arr)


CONNECTION_FAMILIES = ("zero", "constant", "affine", "landau", "poly2", "random-poly2", "Abar")
TWO_FORM_FAMILIES = ("zero", "constant", "poly2", "random-poly2", "flatting", "flatting-perturbed")
PATH_FAMILIES = ("segment", "arc", "cubic", "points")
VECTOR_FAMILIES = ("constant", "linear", "sine")
SURFACE_FAMILIES = ("identity-square", "affine", "warp", "constant-path", "sweep", "points")


def _family(ctx, spec, path, allowed):
    fam = ctx.get(spec, "family", path, kind=str, required=True)
    if fam not in allowed:
        raise ctx.error(UnknownFamily, f"unknown {path} family {fam!r}; known: {list(allowed)}",
                        f"{path}.family", f'"{fam}"')
    return fam


def build_connection(ctx, spec, path, group, rng, abar=None) -> ConnectionField:
    fam = _family(ctx, spec, path, CONNECTION_FAMILIES)
    if fam == "Abar":
        if abar is None:
            raise ctx.error(ConfigParse, "only A may copy Abar", f"{path}.family", '"Abar"')
        return abar
    if fam == "zero":
        return zero_connection(group)
    if fam == "landau":
        b = ctx.get(spec, "b", path, 1.0, (int, float))
        k = ctx.get(spec, "generator", path, 0, int)
        if not 0 <= k < group.dim:
            raise ctx.error(ConfigParse, f"generator index {k} out of range", f"{path}.generator", "generator")
        return landau_connection(group, float(b), group.basis[k])
    if fam == "random-poly2":
        return random_poly2_connection(group, rng, float(ctx.get(spec, "scale", path, 0.3, (int, float))))
    const = _coeff_array(ctx, spec, "components" if fam == "constant" else "const", path, (2,), group)
    if fam == "constant":
        if const is None:
            raise ctx.error(ConfigParse, "constant connection needs 'components'", f"{path}.components")
        return constant_connection(group, const)
    linear = _coeff_array(ctx, spec, "linear", path, (2, 2), group)
    if fam == "affine":
        return affine_connection(group, const if const is not None else group.zero((2,)),
                                 linear if linear is not None else group.zero((2, 2)))
    quad = _coeff_array(ctx, spec, "quad", path, (2, 3), group)
    return poly2_connection(group, const, linear, quad)


def build_two_form(ctx, spec, path, cm, abar, rng):
    H = cm.H
    fam = _family(ctx, spec, path, TWO_FORM_FAMILIES)
    if fam == "zero":
        return zero_two_form(H)
    if fam == "constant":
        value = _coeff_array(ctx, spec, "value", path, (), H)
        if value is None:
            raise ctx.error(ConfigParse, "constant 2-form needs 'value'", f"{path}.value")
        return constant_two_form(H, value)
    if fam == "random-poly2":
        scale = float(ctx.get(spec, "scale", path, 0.3, (int, float)))
        c = scale * rng.standard_normal((1 + 2 + 3, H.dim))
        alg = H.from_coeffs(c)
        return poly2_two_form(H, alg[0], alg[1:3], alg[3:])
    if fam == "poly2":
        return poly2_two_form(H, _coeff_array(ctx, spec, "const", path, (), H),
                              _coeff_array(ctx, spec, "linear", path, (2,), H),
                              _coeff_array(ctx, spec, "quad", path, (3,), H))
    offset = _coeff_array(ctx, spec, "offset", path, (), H)
    if fam == "flatting-perturbed" and offset is None:
        raise ctx.error(ConfigParse, "flatting-perturbed needs 'offset'", f"{path}.offset")
    try:
        return make_flatting_B(abar, cm, offset)
    except SurfholError as exc:
        raise ctx.error(ConfigParse, str(exc), f"{path}.family", f'"{fam}"') from None


def build_path(ctx, spec, path):
    fam = _family(ctx, spec, path, PATH_FAMILIES)
    if fam == "segment":
        return Segment(ctx.vector(spec, "from", path, 2, [0.0, 0.0]), ctx.vector(spec, "to", path, 2, [1.0, 0.0]))
    if fam == "arc":
        return Arc(ctx.vector(spec, "center", path, 2, [0.0, 0.0]),
                   float(ctx.get(spec, "radius", path, 1.0, (int, float))),
                   float(ctx.get(spec, "angle0", path, 0.0, (int, float))),
                   float(ctx.get(spec, "angle1", path, np.pi / 2, (int, float))))
    if fam == "cubic":
        ctrl = np.asarray(ctx.get(spec, "control", path, required=True), dtype=float)
        if ctrl.shape != (4, 2):
            raise ctx.error(ConfigParse, "cubic path needs 4 control points", f"{path}.control", "control")
        return CubicBezier(ctrl)
    t = ctx.vector(spec, "t", path, None)
    x = np.asarray(ctx.get(spec, "x", path, required=True), dtype=float)
    if x.shape != (len(t), 2):
        raise ctx.error(ConfigParse, "points path needs x with one 2-vector per t", f"{path}.x", "x")
    return SplinePath(t, x)


def build_vector_field(ctx, spec, path):
    fam = _family(ctx, spec, path, VECTOR_FAMILIES)
    if fam == "constant":
        return VectorFieldMap.constant(ctx.vector(spec, "vector", path, 2, [0.0, 1.0]))
    if fam == "linear":
        return VectorFieldMap.linear(ctx.vector(spec, "from", path, 2, [0.0, 1.0]),
                                     ctx.vector(spec, "to", path, 2, [0.0, 1.0]))
    return VectorFieldMap.sine(ctx.vector(spec, "vector", path, 2, [0.0, 1.0]),
                               float(ctx.get(spec, "k", path, 1.0, (int, float))))


def build_surface(ctx, spec, path, geometry):
    fam = _family(ctx, spec, path, SURFACE_FAMILIES)
    if fam == "identity-square":
        return IdentitySquare()
    if fam == "affine":
        return AffineSurface(ctx.vector(spec, "origin", path, 2, [0.0, 0.0]),
                             ctx.vector(spec, "e1", path, 2, [1.0, 0.0]),
                             ctx.vector(spec, "e2", path, 2, [0.0, 1.0]))
    if fam == "warp":
        return WarpSurface(float(ctx.get(spec, "amplitude", path, 0.2, (int, float))))
    if fam == "constant-path":
        return ConstantPathSurface(geometry["path"])
    if fam == "sweep":
        return SweepSurface(geometry["path"], geometry["field"])
    t = ctx.vector(spec, "t", path, None)
    s = ctx.vector(spec, "s", path, None)
    x = np.asarray(ctx.get(spec, "x", path, required=True), dtype=float)
    if x.shape != (len(s), len(t), 2):
        raise ctx.error(ConfigParse, "points surface needs x[j][i] = [x1, x2]", f"{path}.x", "x")
    return SplineSurface(t, s, x)


# ----------------------------------------------------------------------------
# scenario


@dataclass
class Scenario:
    name: str
    cm: object
    Abar: ConnectionField
    A: ConnectionField
    B: object
    path: object
    field_x: VectorFieldMap
    field_y: VectorFieldMap
    surface: object
    reparam: Optional[Reparametrization]
    enforce_conditions: bool
    n_t: int
    n_s: int
    tolerances: dict
    tasks: list
    seed: int
    text: Optional[str] = None
    raw: dict = field(default_factory=dict)

    def with_resolution(self, n):
        return parse_scenario(self.text, n_override=n, seed_override=self.seed)


def _check_n(ctx, value, key):
    if not isinstance(value, int) or value < 10 or value % 2:
        raise ctx.error(ConfigParse, f"{key} must be an even integer >= 10, got {value!r}",
                        f"numerics.{key}", key)
    return value


def parse_scenario(text, n_override=None, seed_override=None) -> Scenario:
    """Parse and fully validate a scenario config."""
    ctx = _Ctx(text)
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        raise ConfigParse(f"invalid TOML: {exc}", line=line) from None

    unknown = set(raw) - TOP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ctx.error(ConfigParse, f"unknown top-level key {key!r}", key, key)

    name = ctx.get(raw, "name", "", "unnamed", str)
    seed = int(seed_override if seed_override is not None else ctx.get(raw, "seed", "", 0, int))
    cm_name = ctx.get(raw, "crossed_module", "", "su2-conj", str)
    if cm_name not in CROSSED_MODULES:
        raise ctx.error(UnknownFamily, f"unknown crossed module {cm_name!r}; known: {sorted(CROSSED_MODULES)}",
                        "crossed_module", cm_name)
    cm = crossed_module(cm_name)

    tasks = ctx.get(raw, "tasks", "", [], list)
    for t in tasks:
        if t not in TASKS:
            raise ctx.error(UnknownTask, f"unknown task {t!r}; known: {list(TASKS)}", "tasks", f'"{t}"')

    fields_spec = ctx.get(raw, "fields", "", {}, dict)
    rngs = [np.random.default_rng([seed, k]) for k in range(3)]
    Abar = build_connection(ctx, fields_spec.get("Abar", {"family": "zero"}), "fields.Abar", cm.G, rngs[0])
    A = build_connection(ctx, fields_spec.get("A", {"family": "Abar"}), "fields.A", cm.G, rngs[1], Abar)
    B = build_two_form(ctx, fields_spec.get("B", {"family": "zero"}), "fields.B", cm, Abar, rngs[2])

    geo_spec = ctx.get(raw, "geometry", "", {}, dict)
    geometry = {}
    geometry["path"] = build_path(ctx, geo_spec.get("path", {"family": "segment"}), "geometry.path")
    geometry["field"] = build_vector_field(ctx, geo_spec.get("field", {"family": "constant"}), "geometry.field")
    geometry["field2"] = build_vector_field(
        ctx, geo_spec.get("field2", {"family": "constant", "vector": [1.0, 0.0]}), "geometry.field2")
    surface = build_surface(ctx, geo_spec.get("surface", {"family": "identity-square"}),
                            "geometry.surface", geometry)

    reparam, enforce = None, True
    rp = ctx.get(raw, "reparametrization", "", None, dict)
    if rp is not None:
        mode = ctx.get(rp, "mode", "reparametrization", "i", str)
        if mode not in ("i", "ii"):
            raise ctx.error(UnknownFamily, f"reparametrization mode must be 'i' or 'ii', got {mode!r}",
                            "reparametrization.mode", f'"{mode}"')
        try:
            reparam = Reparametrization(
                float(ctx.get(rp, "a", "reparametrization", 0.0, (int, float))),
                float(ctx.get(rp, "b", "reparametrization", 0.0, (int, float))),
                float(ctx.get(rp, "c", "reparametrization", 0.0, (int, float))),
                mode, bool(ctx.get(rp, "fix_initial", "reparametrization", False, bool)),
            )
            reparam.check_diffeo()
        except SurfholError as exc:
            raise ctx.error(ConfigParse, str(exc), "reparametrization", "[reparametrization]") from None
        enforce = bool(ctx.get(rp, "enforce_conditions", "reparametrization", True, bool))
    elif "reparam" in tasks:
        raise ctx.error(ConfigParse, "task 'reparam' needs a [reparametrization] table", "reparametrization")

    num = ctx.get(raw, "numerics", "", {}, dict)
    n_t = _check_n(ctx, n_override if n_override is not None else num.get("N_t", 200), "N_t")
    n_s = _check_n(ctx, n_override if n_override is not None else num.get("N_s", n_t), "N_s")
    tolerances = dict(DEFAULT_TOLERANCES)
    for key, value in num.get("tolerances", {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ctx.error(ConfigParse, f"unknown tolerance {key!r}", f"numerics.tolerances.{key}", key)
        if not isinstance(value, (int, float)) or value <= 0:
            raise ctx.error(ConfigParse, f"tolerance {key} must be positive", f"numerics.tolerances.{key}", key)
        tolerances[key] = float(value)

    return Scenario(name, cm, Abar, A, B, geometry["path"], geometry["field"], geometry["field2"],
                    surface, reparam, enforce, n_t, n_s, tolerances, list(tasks), seed, text, raw)


def shipped_scenarios():
    return sorted(p.name[:-5] for p in resources.files("surfhol.scenarios").iterdir()
                  if p.name.endswith(".toml"))


def load_scenario_text(name_or_path):
    """Read a config file, or a shipped scenario by name."""
    from pathlib import Path

    p = Path(name_or_path)
    if p.exists():
        return p.read_text()
    res = resources.files("surfhol.scenarios").joinpath(f"{name_or_path}.toml")
    if res.is_file():
        return res.read_text()
    raise ConfigParse(f"no config file or shipped scenario named {name_or_path!r}")


# ----------------------------------------------------------------------------
# tasks; each returns a dict of named residuals, the first entry being the headline one


def _task_check_cm(sc):
    rep = crossed_module_check(sc.cm, 1000, sc.seed)
    return {"max": rep.max_residual, "equivariance": rep.equivariance, "peiffer": rep.peiffer}


def _task_transport_path(sc):
    gamma = sc.path.sample(sc.n_t)
    lift = path_holonomy(sc.Abar, gamma)
    rev = path_holonomy(sc.Abar, sc.path.reversed().sample(sc.n_t))
    G = sc.cm.G
    group = G.group_residual(lift.frame)
    reversal = float(frob(rev.frame[-1] - G.inv(lift.frame[-1])))
    return {"max": max(group, reversal), "group": group, "reversal": reversal}


def _task_transport_surface(sc):
    grid = sc.surface.sample(sc.n_t, sc.n_s)
    lift = surface_lift(sc.Abar, sc.A, grid)
    h0 = surface_holonomy(sc.Abar, sc.A, sc.B, sc.cm, grid, lift=lift)
    frames = sc.cm.G.group_residual(lift.frames())
    hol = sc.cm.H.group_residual(h0)
    return {"max": max(frames, hol), "frames": frames, "h0": hol}


def _task_biholonomy(sc):
    grid = sc.surface.sample(sc.n_t, sc.n_s)
    lift = surface_lift(sc.Abar, sc.A, grid)
    closed = biholonomy_closed_form(lift, edge_transport(sc.A, grid, grid.n_t))
    loop = biholonomy_right_edge(sc.Abar, sc.A, grid)
    r = float(np.max(frob(closed - loop)))
    return {"closed_vs_loop": r}


def _task_stokes(sc):
    gamma = sc.path.sample(sc.n_t)
    vt = tangent_field_from_variation(sc.Abar, gamma, sc.field_x.sample(gamma))
    return {"stokes": stokes_residual(sc.Abar, vt.along, vt, 1.0)}


def _task_omega_axioms(sc):
    rng = np.random.default_rng([sc.seed, 10])
    G = sc.cm.G
    gamma = sc.path.sample(sc.n_t)
    lift = path_holonomy(sc.Abar, gamma)
    X = G.random_algebra(rng)
    vertical = TangentField(gamma, np.zeros_like(gamma.points))
    vt = lift_tangent_field(sc.Abar, lift, vertical, X)
    gen = float(frob(omega_eval(sc.A, sc.Abar, sc.B, sc.cm, lift, vt) - X))
    v = sigma_lift_tangent_field(sc.Abar, lift, sc.field_x.sample(gamma))
    base = omega_eval(sc.A, sc.Abar, sc.B, sc.cm, lift, v)
    worst = 0.0
    for g in G.random(rng, 1.0, 5):
        moved = omega_eval(sc.A, sc.Abar, sc.B, sc.cm, lift.translated(g), v.translated(g))
        worst = max(worst, float(frob(moved - G.inv(g) @ base @ g)))
    return {"max": max(gen, worst), "vertical_generator": gen, "equivariance": worst}


def _task_omega_lift(sc):
    gamma = sc.path.sample(sc.n_t)
    lift = path_holonomy(sc.Abar, gamma)
    v = sc.field_x.sample(gamma)
    hl = omega_horizontal_lift(sc.A, sc.Abar, sc.B, sc.cm, lift, v)
    omega = float(frob(omega_eval(sc.A, sc.Abar, sc.B, sc.cm, lift, hl)))
    forward = lift_tangent_field(sc.Abar, lift, v, hl.vertical_part[0])
    cross = float(np.max(frob(forward.vertical_part - hl.vertical_part)))
    tangency = max(stokes_residual(sc.Abar, lift, hl, T) for T in gamma.t[2::2])
    return {"max": max(omega, cross, tangency), "omega": omega, "forward_form": cross,
            "tangency": tangency}


def _task_curvature(sc):
    gamma = sc.path.sample(sc.n_t)
    X, Y = sc.field_x.sample(gamma), sc.field_y.sample(gamma)
    terms = omega_curvature_eval(sc.A, sc.Abar, sc.B, sc.cm, gamma, X, Y)
    direct = omega_curvature_direct(sc.A, sc.Abar, sc.B, sc.cm, gamma, X, Y)
    return {"terms_vs_direct": float(frob(terms.total - direct)), "norm": float(frob(direct))}


def _task_tgb(sc):
    rep = verify_tgb(sc.Abar, sc.A, sc.B, sc.cm, sc.surface.sample(sc.n_t, sc.n_s))
    return {"tgb": rep.residual}


def _task_ptev1a(sc):
    return {"ptev1a": ev1_transport_check(sc.Abar, sc.A, sc.surface.sample(sc.n_t, sc.n_s)).residual}


def _task_theta(sc):
    grid = sc.surface.sample(sc.n_t, sc.n_s)
    b = theta_transport(sc.B, sc.cm, sc.Abar, sc.A, grid)
    h0 = surface_holonomy(sc.Abar, sc.A, sc.B, sc.cm, grid)
    return {"theta_vs_h0": float(np.max(frob(b - h0)))}


def _task_reparam(sc):
    rep = verify_reparam(sc.Abar, sc.A, sc.B, sc.cm, sc.surface, sc.reparam, sc.n_t,
                         enforce=sc.enforce_conditions)
    return {"max": rep.residual, "frames": rep.frame_residual, "points": rep.point_residual,
            "fake_curvature": rep.fake_curvature}


def _task_plaquette(sc, n=1000):
    cm = sc.cm
    rng = np.random.default_rng([sc.seed, 20])
    m = random_plaquette(cm, rng, size=n)
    m2 = random_plaquette(cm, rng, size=n, a=m.c)
    m3 = random_plaquette(cm, rng, size=n, a=m2.c)
    k = random_plaquette(cm, rng, size=n, d=m.b)
    k2 = random_plaquette(cm, rng, size=n, d=k.b)
    assoc = max(plaquette_distance(compose_v(compose_v(m, m2), m3), compose_v(m, compose_v(m2, m3))),
                plaquette_distance(compose_h(compose_h(m, k), k2), compose_h(m, compose_h(k, k2))))
    ident = max(plaquette_distance(compose_v(identity_v(m.a, cm), m), m),
                plaquette_distance(compose_v(m, identity_v(m.c, cm)), m),
                plaquette_distance(compose_h(identity_h(m.d, cm), m), m),
                plaquette_distance(compose_h(m, identity_h(m.b, cm)), m))
    inv = max(plaquette_distance(compose_v(m, inverse_v(m)), identity_v(m.a, cm)),
              plaquette_distance(compose_v(inverse_v(m), m), identity_v(m.c, cm)),
              plaquette_distance(compose_h(m, inverse_h(m)), identity_h(m.d, cm)),
              plaquette_distance(compose_h(inverse_h(m), m), identity_h(m.b, cm)))
    z = central_twist(cm)
    closure = 0.0
    for twist in (None, z) if z is not None else (None,):
        zz = None if twist is None else np.broadcast_to(twist, (n,) + twist.shape)
        q = random_quasi_flat(cm, rng, z=zz, size=n)
        qv = random_quasi_flat(cm, rng, z=zz, size=n, a=q.c)
        qh = random_quasi_flat(cm, rng, z=zz, size=n, d=q.b)
        closure = max(closure, quasi_flat_closure_check(q, qv, "V"), quasi_flat_closure_check(q, qh, "H"))
    window = interchange_check(*random_window(cm, rng, size=500))
    return {"max": max(assoc, ident, inv, closure, window.boundary, window.tau_residual),
            "associativity": assoc, "identity": ident, "inverse": inv, "closure": closure,
            "interchange_boundary": window.boundary, "interchange_tau": window.tau_residual,
            "interchange_h_difference": window.h_difference}


def _task_bridge(sc):
    cm = sc.cm
    full = from_transport(sc.Abar, sc.A, sc.B, cm, sc.surface.sample(sc.n_t, sc.n_s))
    half_n = sc.n_t // 2 if (sc.n_t // 2) % 2 == 0 else sc.n_t
    left = from_transport(sc.Abar, sc.A, sc.B, cm, sc.surface.restrict_t(0.0, 0.5).sample(half_n, sc.n_s))
    right = from_transport(sc.Abar, sc.A, sc.B, cm, sc.surface.restrict_t(0.5, 1.0).sample(half_n, sc.n_s))
    _, qf = is_quasi_flat(full)
    paste = tau_distance(compose_h(left, right, tol=1e-8), full)
    return {"max": max(qf, paste), "quasi_flat": qf, "half_pasting": paste}


def _task_halfpath(sc):
    n = sc.n_t - sc.n_t % 4
    return {"path_vertical_gap": half_path_difference(sc.A, sc.Abar, sc.B, sc.cm, sc.path, sc.field_x, n),
            "surface_frame_gap": half_surface_difference(sc.Abar, sc.A, sc.B, sc.cm, sc.surface, n)}


RUNNERS = {
    "check-cm": _task_check_cm,
    "transport-path": _task_transport_path,
    "transport-surface": _task_transport_surface,
    "biholonomy": _task_biholonomy,
    "stokes": _task_stokes,
    "omega-axioms": _task_omega_axioms,
    "omega-lift": _task_omega_lift,
    "curvature": _task_curvature,
    "tgb": _task_tgb,
    "ptev1a": _task_ptev1a,
    "theta-transport": _task_theta,
    "reparam": _task_reparam,
    "plaquette": _task_plaquette,
    "bridge": _task_bridge,
    "halfpath": _task_halfpath,
}


def run_task(sc: Scenario, task: str) -> dict:
    t0 = time.perf_counter()
    residuals = RUNNERS[task](sc)
    wall = time.perf_counter() - t0
    headline = float(next(iter(residuals.values())))
    key = TASKS[task]
    tol = None if key is None else sc.tolerances[key]
    record = {
        "task": task,
        "residuals": {k: float(v) for k, v in residuals.items()},
        "residual": headline,
        "tolerance": tol,
        "pass": True if tol is None else bool(headline < tol),
        "wall_time": wall,
    }
    if task == "curvature":
        record["method"] = "FD-d"
    return record


def environment():
    return {"version": __version__, "precision": "float64/complex128", "numpy": np.__version__}


def run_scenario(text, tasks=None, n_override=None, seed_override=None) -> dict:
    """Parse, validate and run; returns the report dict."""
    sc = parse_scenario(text, n_override, seed_override)
    todo = sc.tasks if tasks is None else list(tasks)
    for t in todo:
        if t not in TASKS:
            raise UnknownTask(f"unknown task {t!r}; known: {list(TASKS)}", field="tasks")
    return {
        "scenario": sc.name,
        "seed": sc.seed,
        "N_t": sc.n_t,
        "N_s": sc.n_s,
        "tasks": [run_task(sc, t) for t in todo],
        "environment": environment(),
    }


def report_passed(report) -> bool:
    return all(t["pass"] for t in report["tasks"])


def run_convergence(text, n_list, tasks=None, seed_override=None):
    """Rows ``(N, task, residual, slope)``; the slope is the fitted order over all N."""
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigParse("N values must be increasing", field="N")
    base = parse_scenario(text, n_override=n_list[0], seed_override=seed_override)
    todo = [t for t in base.tasks if t in CONVERGENT_TASKS] if tasks is None else list(tasks)
    for t in todo:
        if t not in TASKS:
            raise UnknownTask(f"unknown task {t!r}", field="tasks")
    scenarios = [base] + [parse_scenario(text, n, seed_override) for n in n_list[1:]]
    rows = []
    for task in todo:
        res = [run_task(sc, task)["residual"] for sc in scenarios]
        slope = loglog_slope(n_list, res)
        rows.extend((n, task, r, slope) for n, r in zip(n_list, res))
    return rows


def convergence_csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "task", "residual", "slope"])
    for n, task, r, slope in rows:
        w.writerow([n, task, repr(float(r)), "" if slope is None else f"{slope:.6f}"])
    return buf.getvalue()


def crossed_module_report(names=None, seed=0):
    """check-cm over several crossed modules (no scenario needed)."""
    names = sorted(CROSSED_MODULES) if names is None else names
    tasks = []
    for name in names:
        t0 = time.perf_counter()
        rep = crossed_module_check(crossed_module(name), 1000, seed)
        tasks.append({"task": f"check-cm:{name}",
                      "residuals": {"equivariance": rep.equivariance, "peiffer": rep.peiffer},
                      "residual": rep.max_residual, "tolerance": DEFAULT_TOLERANCES["tol_cm"],
                      "pass": rep.max_residual < DEFAULT_TOLERANCES["tol_cm"],
                      "wall_time": time.perf_counter() - t0})
    return {"scenario": None, "seed": seed, "tasks": tasks, "environment": environment()}
