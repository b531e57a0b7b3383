"""Plaquettes ``(a, b, c, d; h)`` over a crossed module and their two compositions.

Edges: ``a`` bottom, ``b`` right, ``c`` top, ``d`` left. In the vertical
category a plaquette runs from ``a`` to ``c``; in the horizontal one from
``d`` to ``b``. Composition is exact matrix algebra, so every law is checked
at roundoff level.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import NotComposable, NotQuasiFlat
from .liecore import CrossedModule, crossed_module, frob

TOL_CAT = 1e-10
EDGES = ("a", "b", "c", "d")


@dataclass(frozen=True, eq=False)
class Plaquette:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    h: np.ndarray
    cm: CrossedModule
    z: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.z is not None:
            rng = np.random.default_rng(0)
            g = self.cm.G.random(rng, 1.0, 8)
            z = self.z[..., None, :, :]
            if np.max(frob(g @ z - z @ g)) > TOL_CAT:
                raise ValueError("z is not central in G")

    @property
    def twist(self):
        return self.cm.G.identity() if self.z is None else self.z

    def edges(self):
        return tuple(getattr(self, k) for k in EDGES)

    def __repr__(self):
        return f"Plaquette(cm={self.cm.name!r}, twisted={self.z is not None})"


def _product_z(z1, z2):
    if z1 is None and z2 is None:
        return None
    if z1 is None:
        return z2
    if z2 is None:
        return z1
    return z1 @ z2


def _check_match(x, y, message, left, right, tol):
    if x.shape != y.shape or np.max(np.abs(x - y)) > tol:
        raise NotComposable(message, left, right)


def compose_v(lower: Plaquette, upper: Plaquette, tol=TOL_CAT) -> Plaquette:
    """Stack ``upper`` on ``lower``: ``(a, b'b, c', d'd; h alpha(d^-1) h')``."""
    _check_match(lower.c, upper.a, "vertical composition needs lower.c == upper.a", lower, upper, tol)
    cm, G = lower.cm, lower.cm.G
    h = lower.h @ cm.alpha(G.inv(lower.d), upper.h)
    return Plaquette(lower.a, upper.b @ lower.b, upper.c, upper.d @ lower.d, h, cm,
                     _product_z(lower.z, upper.z))


def compose_h(left: Plaquette, right: Plaquette, tol=TOL_CAT) -> Plaquette:
    """Place ``right`` beside ``left``: ``(a'a, b', c'c, d; alpha(a^-1) h' h)``."""
    _check_match(left.b, right.d, "horizontal composition needs left.b == right.d", left, right, tol)
    cm, G = left.cm, left.cm.G
    h = cm.alpha(G.inv(left.a), right.h) @ left.h
    return Plaquette(right.a @ left.a, right.b, right.c @ left.c, left.d, h, cm,
                     _product_z(left.z, right.z))


def identity_v(a, cm) -> Plaquette:
    e = cm.G.identity()
    return Plaquette(np.asarray(a, dtype=complex), e, np.asarray(a, dtype=complex), e, cm.H.identity(), cm)


def identity_h(a, cm) -> Plaquette:
    e = cm.G.identity()
    return Plaquette(e, np.asarray(a, dtype=complex), e, np.asarray(a, dtype=complex), cm.H.identity(), cm)


def _inv_z(m):
    return None if m.z is None else m.cm.G.inv(m.z)


def inverse_v(m: Plaquette) -> Plaquette:
    G, H = m.cm.G, m.cm.H
    return Plaquette(m.c, G.inv(m.b), m.a, G.inv(m.d), m.cm.alpha(m.d, H.inv(m.h)), m.cm, _inv_z(m))


def inverse_h(m: Plaquette) -> Plaquette:
    G, H = m.cm.G, m.cm.H
    return Plaquette(G.inv(m.a), m.d, G.inv(m.c), m.b, m.cm.alpha(m.a, H.inv(m.h)), m.cm, _inv_z(m))


def transpose(m: Plaquette) -> Plaquette:
    """Relabel ``(a, b, c, d; h) -> (d, c, b, a; h^-1)``.

    This carries vertical composites to horizontal ones,
    ``transpose(compose_v(lo, up)) == compose_h(transpose(lo), transpose(up))``,
    and vertical identities to horizontal identities.
    """
    return Plaquette(m.d, m.c, m.b, m.a, m.cm.H.inv(m.h), m.cm, _inv_z(m))


def tau_boundary(m: Plaquette):
    """``a^-1 b^-1 c d``."""
    G = m.cm.G
    return G.inv(m.a) @ G.inv(m.b) @ m.c @ m.d


def quasi_flat_residual(m: Plaquette) -> float:
    """Largest residual of the quasi-flat condition over a batch."""
    return float(np.max(frob(m.cm.tau(m.h) - tau_boundary(m) @ m.twist)))


def is_quasi_flat(m: Plaquette, tol=TOL_CAT):
    """``(flag, residual)`` for ``tau(h) = a^-1 b^-1 c d z``."""
    r = quasi_flat_residual(m)
    return r < tol, r


def plaquette_distance(m1: Plaquette, m2: Plaquette) -> float:
    """Largest entrywise edge, h and twist difference."""
    diffs = [frob(x - y) for x, y in zip(m1.edges(), m2.edges())]
    diffs.append(frob(m1.h - m2.h))
    diffs.append(frob(m1.twist - m2.twist))
    return float(max(np.max(d) for d in diffs))


def tau_distance(m1: Plaquette, m2: Plaquette) -> float:
    diffs = [frob(x - y) for x, y in zip(m1.edges(), m2.edges())]
    diffs.append(frob(m1.cm.tau(m1.h) - m2.cm.tau(m2.h)))
    return float(max(np.max(d) for d in diffs))


def tau_equivalent(m1: Plaquette, m2: Plaquette, tol=TOL_CAT) -> bool:
    return tau_distance(m1, m2) < tol


@dataclass(frozen=True)
class InterchangeReport:
    boundary: float  # edge mismatch of the two composites
    tau_residual: float  # ||tau(h^*) - tau(h_*)||
    h_difference: float  # ||h^* - h_*||, not expected to vanish


def interchange_check(m, m1, m2, m3, tol=TOL_CAT) -> InterchangeReport:
    """Compose a 2x2 window both ways.

    Layout: ``m`` bottom-left, ``m1`` bottom-right, ``m2`` top-left,
    ``m3`` top-right. Rows first gives ``h^*``; columns first gives ``h_*``.
    """
    for p in (m, m1, m2, m3):
        ok, r = is_quasi_flat(p, tol)
        if not ok:
            raise NotQuasiFlat(f"window plaquette is not quasi-flat (residual {r:.2e})")
    rows = compose_v(compose_h(m, m1), compose_h(m2, m3))
    cols = compose_h(compose_v(m, m2), compose_v(m1, m3))
    boundary = max(float(np.max(frob(x - y))) for x, y in zip(rows.edges(), cols.edges()))
    cm = m.cm
    return InterchangeReport(boundary, float(np.max(frob(cm.tau(rows.h) - cm.tau(cols.h)))),
                             float(np.max(frob(rows.h - cols.h))))


def quasi_flat_closure_check(m1: Plaquette, m2: Plaquette, direction="V", tol=TOL_CAT) -> float:
    """Quasi-flatness residual of ``compose_v(m1, m2)`` or ``compose_h(m1, m2)``."""
    for p in (m1, m2):
        ok, r = is_quasi_flat(p, tol)
        if not ok:
            raise NotQuasiFlat(f"operand is not quasi-flat (residual {r:.2e})")
    if direction == "V":
        return quasi_flat_residual(compose_v(m1, m2))
    if direction == "H":
        return quasi_flat_residual(compose_h(m1, m2))
    raise ValueError(f"direction must be 'V' or 'H', got {direction!r}")


# ----------------------------------------------------------------------------
# random generation


def random_plaquette(cm, rng, scale=1.0, size=(), **edges) -> Plaquette:
    """Random edges and h (a batch when ``size`` is given); edges passed by keyword are kept."""
    vals = {k: edges[k] if edges.get(k) is not None else cm.G.random(rng, scale, size) for k in EDGES}
    return Plaquette(h=cm.H.random(rng, scale, size), cm=cm, **vals)


def random_quasi_flat(cm, rng, scale=1.0, z=None, size=(), **edges) -> Plaquette:
    """Random quasi-flat plaquette; ``h`` is lifted through a section of tau.

    When tau is trivial there is no section: ``h`` is free and the top edge
    ``c`` is solved from the boundary condition instead (so it must not be given).
    """
    G = cm.G
    zz = G.identity() if z is None else z
    vals = {k: edges[k] if edges.get(k) is not None else G.random(rng, scale, size) for k in EDGES}
    if cm.section is None:
        if edges.get("c") is not None:
            raise ValueError("with trivial tau the top edge is determined by the others")
        vals["c"] = vals["b"] @ vals["a"] @ G.inv(zz) @ G.inv(vals["d"])
        h = cm.H.random(rng, scale, size)
    else:
        G_inv = G.inv
        h = cm.section(G_inv(vals["a"]) @ G_inv(vals["b"]) @ vals["c"] @ vals["d"] @ zz)
    return Plaquette(h=h, cm=cm, z=z, **vals)


def random_window(cm, rng, scale=1.0, twists=(None, None, None, None), size=()):
    """Four quasi-flat plaquettes with matching inner edges (see :func:`interchange_check`)."""
    m = random_quasi_flat(cm, rng, scale, twists[0], size)
    m1 = random_quasi_flat(cm, rng, scale, twists[1], size, d=m.b)
    m2 = random_quasi_flat(cm, rng, scale, twists[2], size, a=m.c)
    m3 = random_quasi_flat(cm, rng, scale, twists[3], size, a=m1.c, d=m2.b)
    return m, m1, m2, m3


def central_twist(cm):
    """``-I`` when it is central in G (SU(2)-type groups), else None."""
    G = cm.G
    z = -G.identity()
    rng = np.random.default_rng(1)
    g = G.random(rng, 1.0, 16)
    if np.max(frob(g @ z - z @ g)) < TOL_CAT and G.group_residual(z[None]) < TOL_CAT:
        return z
    return None


# ----------------------------------------------------------------------------
# continuum bridge


def from_transport(Abar, A, B, cm, grid) -> Plaquette:
    """Boundary transports and surface holonomy of a sampled surface.

    ``a``, ``c``: Abar-transport along the bottom and top paths; ``d``, ``b``:
    A-transport up the left and right edges; ``h = h_0(1)``.
    """
    from .surface import edge_transport, surface_holonomy, surface_lift

    lift = surface_lift(Abar, A, grid)
    h0 = surface_holonomy(Abar, A, B, cm, grid, lift=lift)
    return Plaquette(
        a=lift.row_frames[0, -1], b=edge_transport(A, grid, grid.n_t)[-1],
        c=lift.row_frames[-1, -1], d=lift.left_edge[-1], h=h0[-1], cm=cm,
    )


# ----------------------------------------------------------------------------
# serialization


def _encode(m):
    return None if m is None else np.stack([m.real, m.imag], axis=-1).tolist()


def _decode(x):
    if x is None:
        return None
    arr = np.asarray(x, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def to_dict(m: Plaquette) -> dict:
    """JSON-ready record; matrices as row-major nested ``[re, im]`` pairs."""
    out = {"crossed_module": m.cm.name}
    for k in EDGES + ("h", "z"):
        out[k] = _encode(getattr(m, k))
    return out


def from_dict(record: dict, cm: Optional[CrossedModule] = None) -> Plaquette:
    cm = crossed_module(record["crossed_module"]) if cm is None else cm
    vals = {k: _decode(record[k]) for k in EDGES + ("h",)}
    return Plaquette(cm=cm, z=_decode(record.get("z")), **vals)


def with_h(m: Plaquette, h) -> Plaquette:
    return replace(m, h=h)
