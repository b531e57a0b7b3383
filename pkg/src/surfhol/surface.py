"""Paths of paths: surface lifts, bi-holonomy, surface holonomy and omega-transport.

Surface arrays are indexed ``[j, i]`` with ``j`` running over ``s`` and ``i``
over ``t``, so each row ``Gamma[j]`` is the path ``Gamma_{s_j}``.

The lifted surface is ``Gamma~(t, s) = sigma(Gamma(t, s)) abar_s(t) a_0(s)``:
each row is the Abar-horizontal lift of ``Gamma_s`` started at the point
reached by A-transport up the left edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from .errors import ConditionViolated, GridMismatch, NotDiffeo
from .fields import curvature, fake_curvature, wedge
from .liecore import conj, frob
from .pathspace import PathMap, SampledPath, VectorFieldMap
from .quadrature import simpson, transport

FAKE_FLAT_TOL = 1e-8


# ----------------------------------------------------------------------------
# surface families


class SurfaceMap:
    """Closed-form ``Gamma: [0,1]^2 -> R^2`` with analytic partials."""

    family = "surface"

    def point(self, t, s):
        raise NotImplementedError

    def partials(self, t, s):
        """``(d_t Gamma, d_s Gamma)`` at ``(t, s)``."""
        raise NotImplementedError

    def sample(self, n_t, n_s=None):
        n_s = n_t if n_s is None else n_s
        t = np.linspace(0.0, 1.0, n_t + 1)
        s = np.linspace(0.0, 1.0, n_s + 1)
        S, T = np.meshgrid(s, t, indexing="ij")
        dt, ds = self.partials(T, S)
        return SurfaceGrid(t, s, self.point(T, S), dt, ds, source=self)

    def restrict_t(self, t0, t1):
        return RestrictedSurface(self, t0, t1)


class AffineSurface(SurfaceMap):
    family = "affine"

    def __init__(self, origin=(0.0, 0.0), e1=(1.0, 0.0), e2=(0.0, 1.0)):
        self.origin = np.asarray(origin, dtype=float)
        self.e1 = np.asarray(e1, dtype=float)
        self.e2 = np.asarray(e2, dtype=float)

    def point(self, t, s):
        t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
        return self.origin + t[..., None] * self.e1 + s[..., None] * self.e2

    def partials(self, t, s):
        shape = np.broadcast_shapes(np.shape(t), np.shape(s)) + (2,)
        return np.broadcast_to(self.e1, shape).copy(), np.broadcast_to(self.e2, shape).copy()


class IdentitySquare(AffineSurface):
    family = "identity-square"

    def __init__(self):
        super().__init__()


class WarpSurface(SurfaceMap):
    """``(t + k sin(pi t) sin(pi s), s + k t (1 - t) cos(pi s))``."""

    family = "warp"

    def __init__(self, amplitude=0.2):
        self.amplitude = float(amplitude)

    def point(self, t, s):
        t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
        k = self.amplitude
        x1 = t + k * np.sin(np.pi * t) * np.sin(np.pi * s)
        x2 = s + k * t * (1 - t) * np.cos(np.pi * s)
        return np.stack(np.broadcast_arrays(x1, x2), axis=-1)

    def partials(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        k, pi = self.amplitude, np.pi
        dt = np.stack([1 + k * pi * np.cos(pi * t) * np.sin(pi * s),
                       k * (1 - 2 * t) * np.cos(pi * s)], axis=-1)
        ds = np.stack([k * pi * np.sin(pi * t) * np.cos(pi * s),
                       1 - k * pi * t * (1 - t) * np.sin(pi * s)], axis=-1)
        return dt, ds


class ConstantPathSurface(SurfaceMap):
    """``Gamma_s = gamma`` for every ``s``."""

    family = "constant-path"

    def __init__(self, path: PathMap):
        self.path = path

    def point(self, t, s):
        t, _ = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return self.path.point(t)

    def partials(self, t, s):
        t, _ = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return self.path.velocity(t), np.zeros(t.shape + (2,))


class SweepSurface(SurfaceMap):
    """``Gamma(t, s) = gamma(t) + s v(t)``: a straight-line variation of a path."""

    family = "sweep"

    def __init__(self, path: PathMap, field: VectorFieldMap):
        self.path, self.field = path, field

    def point(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return self.path.point(t) + s[..., None] * self.field.value(t)

    def partials(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return self.path.velocity(t) + s[..., None] * self.field.derivative(t), self.field.value(t)


class SplineSurface(SurfaceMap):
    """Bicubic interpolation of points ``x[j, i] = Gamma(t_i, s_j)``."""

    family = "points"

    def __init__(self, t, s, x):
        x = np.asarray(x, dtype=float)
        self.splines = [RectBivariateSpline(s, t, x[..., k]) for k in range(2)]

    def _eval(self, t, s, ds=0, dt=0):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        return np.stack([sp.ev(s, t, dx=ds, dy=dt) for sp in self.splines], axis=-1)

    def point(self, t, s):
        return self._eval(t, s)

    def partials(self, t, s):
        return self._eval(t, s, dt=1), self._eval(t, s, ds=1)


class RestrictedSurface(SurfaceMap):
    """``(u, s) -> base(t0 + u (t1 - t0), s)``."""

    def __init__(self, base, t0, t1):
        self.base, self.t0, self.t1 = base, float(t0), float(t1)
        self.family = f"{base.family}[t={t0:g}..{t1:g}]"

    def point(self, t, s):
        return self.base.point(self.t0 + np.asarray(t) * (self.t1 - self.t0), s)

    def partials(self, t, s):
        dt, ds = self.base.partials(self.t0 + np.asarray(t) * (self.t1 - self.t0), s)
        return (self.t1 - self.t0) * dt, ds


# ----------------------------------------------------------------------------
# grids and lifts


def _check_axis(grid, name):
    n = len(grid) - 1
    if n < 2 or n % 2:
        raise GridMismatch(f"{name} grid needs an even number >= 2 of intervals, got {n}")
    if grid[0] != 0.0 or grid[-1] != 1.0 or not np.allclose(np.diff(grid), 1.0 / n):
        raise GridMismatch(f"{name} grid must be uniform on [0, 1]")


@dataclass(frozen=True, eq=False)
class SurfaceGrid:
    t: np.ndarray
    s: np.ndarray
    points: np.ndarray  # (Ns+1, Nt+1, 2)
    dt_points: np.ndarray
    ds_points: np.ndarray
    source: Optional[SurfaceMap] = None

    def __post_init__(self):
        _check_axis(self.t, "t")
        _check_axis(self.s, "s")
        shape = (len(self.s), len(self.t), 2)
        for arr in (self.points, self.dt_points, self.ds_points):
            if arr.shape != shape:
                raise GridMismatch(f"surface arrays must have shape {shape}, got {arr.shape}")

    @property
    def n_t(self):
        return len(self.t) - 1

    @property
    def n_s(self):
        return len(self.s) - 1

    @property
    def dt(self):
        return 1.0 / self.n_t

    @property
    def ds(self):
        return 1.0 / self.n_s

    @classmethod
    def from_points(cls, t, s, points, check_tol=1e-4):
        """Grid from raw points ``[j, i]``; partials from a bicubic interpolant.

        The partials are cross-checked against an interpolant through every
        other node; a disagreement above ``check_tol`` means the points are
        too coarse to resolve the surface.
        """
        t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
        points = np.asarray(points, dtype=float)
        if len(t) < 9 or len(s) < 9:
            raise GridMismatch("point-list surface needs at least 8 intervals per axis")
        spline = SplineSurface(t, s, points)
        S, T = np.meshgrid(s, t, indexing="ij")
        dt, ds = spline.partials(T, S)
        coarse = SplineSurface(t[::2], s[::2], points[::2, ::2])
        ct, cs = coarse.partials(T, S)
        if max(np.max(np.abs(ct - dt)), np.max(np.abs(cs - ds))) > check_tol:
            raise GridMismatch("point-list surface is too coarse for consistent partials")
        return cls(t, s, points, dt, ds, source=spline)

    def row(self, j) -> SampledPath:
        return SampledPath(self.t, self.points[j], self.dt_points[j])

    def surface_map(self) -> SurfaceMap:
        if self.source is not None:
            return self.source
        return SplineSurface(self.t, self.s, self.points)

    def jacobian(self):
        """``d_tGamma ^ d_sGamma`` at every node."""
        return wedge(self.dt_points, self.ds_points)


@dataclass(frozen=True, eq=False)
class LiftedSurface:
    base: SurfaceGrid
    left_edge: np.ndarray  # (Ns+1, n, n), a_0(s)
    row_frames: np.ndarray  # (Ns+1, Nt+1, n, n), abar_s(t) from e
    group: object

    def frames(self):
        """Frames of ``Gamma~(t, s)``: ``abar_s(t) a_0(s)``."""
        return self.row_frames @ self.left_edge[:, None]


def row_holonomies(Abar, grid: SurfaceGrid):
    """``abar_s(t)`` for every row, all started at e."""
    xi = Abar(grid.points, grid.dt_points)  # [j, i]
    frames = transport(Abar.group, np.swapaxes(xi, 0, 1), grid.dt)
    return np.swapaxes(frames, 0, 1)


def edge_transport(A, grid: SurfaceGrid, t_index, seed=None):
    """A-transport ``a_t(s)`` up the column ``t = t_index``."""
    xi = A(grid.points[:, t_index], grid.ds_points[:, t_index])
    return transport(A.group, xi, grid.ds, seed)


def surface_lift(Abar, A, grid: SurfaceGrid, seed=None) -> LiftedSurface:
    return LiftedSurface(grid, edge_transport(A, grid, 0, seed), row_holonomies(Abar, grid), Abar.group)


# ----------------------------------------------------------------------------
# bi-holonomy


def _reverse_transport(group, xi_forward, dt):
    """Run a leg backwards: reversed nodes, negated velocity."""
    return transport(group, -xi_forward[::-1], dt)[-1]


def biholonomy(Abar, A, grid: SurfaceGrid, t_index, s_index):
    """``g(t, s)`` by transporting around the loop right, up, back, down.

    The loop starts at ``sigma(Gamma(0, 0))``; the return point is that point
    right-translated by ``g``.
    """
    if not (0 <= t_index <= grid.n_t and 0 <= s_index <= grid.n_s):
        raise IndexError(f"({t_index}, {s_index}) outside the {grid.n_t}x{grid.n_s} grid")
    G = Abar.group
    i, j = t_index, s_index
    leg1 = Abar(grid.points[0, : i + 1], grid.dt_points[0, : i + 1])
    g = transport(G, leg1, grid.dt)[-1]
    leg2 = A(grid.points[: j + 1, i], grid.ds_points[: j + 1, i])
    g = transport(G, leg2, grid.ds, g)[-1]
    leg3 = Abar(grid.points[j, : i + 1], grid.dt_points[j, : i + 1])
    g = _reverse_transport(G, leg3, grid.dt) @ g
    leg4 = A(grid.points[: j + 1, 0], grid.ds_points[: j + 1, 0])
    return _reverse_transport(G, leg4, grid.ds) @ g


def biholonomy_right_edge(Abar, A, grid: SurfaceGrid):
    """``g(1, s)`` for every ``s`` by loop composition, all loops at once."""
    G = Abar.group
    abar0 = transport(G, Abar(grid.points[0], grid.dt_points[0]), grid.dt)[-1]
    up = edge_transport(A, grid, grid.n_t, abar0)  # a_1(s) abar_0(1)
    rows = Abar(grid.points, grid.dt_points)
    back = transport(G, -np.swapaxes(rows[:, ::-1], 0, 1), grid.dt)[-1]  # abar_s(1)^-1
    xi = A(grid.points[:, 0], grid.ds_points[:, 0])
    down_steps = G.exp(0.5 * grid.ds * (xi[:-1] + xi[1:]))  # inverse steps of a_0
    down = np.empty_like(up)
    down[0] = G.identity()
    for k in range(grid.n_s):
        down[k + 1] = down[k] @ down_steps[k]
    return down @ back @ up


def biholonomy_closed_form(lift: LiftedSurface, right_edge):
    """``a_0(s)^-1 abar_s(1)^-1 a_1(s) abar_0(1)``."""
    G = lift.group
    return G.inv(lift.left_edge) @ G.inv(lift.row_frames[:, -1]) @ right_edge @ lift.row_frames[0, -1]


# ----------------------------------------------------------------------------
# s-direction ODEs


def _b_flux(B, cm, grid, frames):
    """``int_0^1 alpha(frame^-1) B_sigma(d_t Gamma, d_s Gamma) dt`` per row."""
    b = B(grid.points, grid.dt_points, grid.ds_points)
    return simpson(cm.alpha_alg(cm.G.inv(frames), b), grid.dt, axis=1)


def surface_holonomy(Abar, A, B, cm, grid: SurfaceGrid, g_edge=None, lift=None):
    """``h_0(s)`` from ``dh/ds h^-1 = -int alpha((abar_s(t) a_0(s) g(1, s))^-1) B_sigma(dtGamma, dsGamma) dt``."""
    lift = surface_lift(Abar, A, grid) if lift is None else lift
    g_edge = biholonomy_right_edge(Abar, A, grid) if g_edge is None else g_edge
    frames = lift.frames() @ g_edge[:, None]
    K = _b_flux(B, cm, grid, frames)
    return transport(cm.H, K, grid.ds)


def row_omega(A, Abar, B, cm, grid: SurfaceGrid, row_frames=None):
    """``omega(A, B)`` pulled back by the sigma-lift, on ``d_s Gamma`` of every row."""
    G = Abar.group
    frames = row_holonomies(Abar, grid) if row_frames is None else row_frames
    x0, x1 = grid.points[:, 0], grid.points[:, -1]
    V0, V1 = grid.ds_points[:, 0], grid.ds_points[:, -1]
    diff1 = A(x1, V1) - Abar(x1, V1)
    diff0 = A(x0, V0) - Abar(x0, V0)
    F = curvature(Abar, grid.points) * grid.jacobian()[..., None, None]
    inner = simpson(conj(G.inv(frames), F, G), grid.dt, axis=1)
    flux = cm.tau_alg(_b_flux(B, cm, grid, frames))
    return A(x0, V0) + conj(G.inv(frames[:, -1]), diff1, G) - diff0 + inner + flux


def omega_transport_local(Abar, A, B, cm, grid: SurfaceGrid, row_frames=None):
    """``c(s)`` with ``c' = -W(s) c``, ``c(0) = e``; the transported path is ``sigma~(Gamma_s) c(s)``."""
    W = row_omega(A, Abar, B, cm, grid, row_frames)
    return transport(Abar.group, W, grid.ds)


@dataclass(frozen=True, eq=False)
class SurfaceTransportReport:
    residual: float
    residuals: np.ndarray  # per s node
    c: np.ndarray
    a0: np.ndarray
    g: np.ndarray
    h0: np.ndarray


def verify_tgb(Abar, A, B, cm, grid: SurfaceGrid) -> SurfaceTransportReport:
    """Compare ``c(s)`` with ``a_0(s) g(1, s) tau(h_0(s))``; each factor from its own ODE."""
    lift = surface_lift(Abar, A, grid)
    g = biholonomy_right_edge(Abar, A, grid)
    h0 = surface_holonomy(Abar, A, B, cm, grid, g, lift)
    c = omega_transport_local(Abar, A, B, cm, grid, lift.row_frames)
    res = frob(c - lift.left_edge @ g @ cm.tau(h0))
    return SurfaceTransportReport(float(np.max(res)), res, c, lift.left_edge, g, h0)


@dataclass(frozen=True, eq=False)
class EndpointTransport:
    residual: float
    residuals: np.ndarray
    beta: np.ndarray  # transported frame offset
    g: np.ndarray  # g(1, s) by loop composition


def ev1_frame_offset(Abar, A, grid: SurfaceGrid, lift: Optional[LiftedSurface] = None):
    """Transport of ``Gamma~_0`` by ``ev_1^* A``: rows ``Gamma~_s beta(s)``.

    The vertical part at ``t = 1`` of the lifted ``d_s`` field is obtained by
    integrating the tangency equation along each row from its value at
    ``t = 0``; ``beta`` then solves the horizontality condition at the endpoint.
    """
    G = Abar.group
    lift = surface_lift(Abar, A, grid) if lift is None else lift
    frames = lift.frames()
    x0, x1 = grid.points[:, 0], grid.points[:, -1]
    V0, V1 = grid.ds_points[:, 0], grid.ds_points[:, -1]
    w0 = conj(G.inv(lift.left_edge), Abar(x0, V0) - A(x0, V0), G)
    F = curvature(Abar, grid.points) * grid.jacobian()[..., None, None]
    w1 = w0 + simpson(conj(G.inv(frames), F, G), grid.dt, axis=1)
    xi = conj(G.inv(frames[:, -1]), A(x1, V1) - Abar(x1, V1), G) + w1
    return transport(G, xi, grid.ds)


def ev1_transport_check(Abar, A, grid: SurfaceGrid) -> EndpointTransport:
    """``beta(s)`` from the endpoint-horizontality ODE against loop-composed ``g(1, s)``."""
    beta = ev1_frame_offset(Abar, A, grid)
    g = biholonomy_right_edge(Abar, A, grid)
    res = frob(beta - g)
    return EndpointTransport(float(np.max(res)), res, beta, g)


def theta_transport(B, cm, Abar, A, grid: SurfaceGrid):
    """``b_s`` in H: parallel transport by theta along the ev_1^*A-horizontal path of paths."""
    lift = surface_lift(Abar, A, grid)
    beta = ev1_frame_offset(Abar, A, grid, lift)
    K = _b_flux(B, cm, grid, lift.frames() @ beta[:, None])
    return transport(cm.H, K, grid.ds)


# ----------------------------------------------------------------------------
# reparametrization


@dataclass(frozen=True)
class Reparametrization:
    """``Phi(t, s) = (phi(t, s), chi(t, s))`` fixing the vertices of the square.

    ``phi = t + a t (1 - t) k(s)`` with ``k(s) = (1 + s) / 2`` (or ``k = s`` when
    ``fix_initial``, so that ``Phi_0`` is the identity), ``psi(s) = s + b s (1 - s)``,
    and ``chi = psi(s)`` in mode ``"i"`` or ``psi(s) + c t (1 - t) s (1 - s)`` in
    mode ``"ii"``.
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    mode: str = "i"
    fix_initial: bool = False

    def __post_init__(self):
        if self.mode not in ("i", "ii"):
            raise ValueError(f"mode must be 'i' or 'ii', got {self.mode!r}")
        if self.mode == "i" and self.c != 0.0:
            raise NotDiffeo("mode i keeps s-sections: c must be 0")
        if abs(self.a) >= 1 or abs(self.b) >= 1:
            raise NotDiffeo("a and b must lie in (-1, 1)")

    def _k(self, s):
        return (s, np.ones_like(s)) if self.fix_initial else ((1 + s) / 2, 0.5 * np.ones_like(s))

    def __call__(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        k, _ = self._k(s)
        phi = t + self.a * t * (1 - t) * k
        chi = s + self.b * s * (1 - s) + self.c * t * (1 - t) * s * (1 - s)
        return phi, chi

    def jacobian(self, t, s):
        """``[[phi_t, phi_s], [chi_t, chi_s]]`` stacked on the last two axes."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        k, dk = self._k(s)
        phi_t = 1 + self.a * (1 - 2 * t) * k
        phi_s = self.a * t * (1 - t) * dk
        chi_t = self.c * (1 - 2 * t) * s * (1 - s)
        chi_s = 1 + self.b * (1 - 2 * s) + self.c * t * (1 - t) * (1 - 2 * s)
        return np.stack([np.stack([phi_t, phi_s], -1), np.stack([chi_t, chi_s], -1)], -2)

    def check_diffeo(self, n=200):
        t = np.linspace(0, 1, n + 1)
        T, S = np.meshgrid(t, t, indexing="ij")
        J = self.jacobian(T, S)
        if np.min(J[..., 0, 0]) <= 0 or np.min(np.linalg.det(J)) <= 0:
            raise NotDiffeo("reparametrization is not orientation-preserving on the grid")
        corners = np.array([0.0, 1.0])
        for t0 in corners:
            for s0 in corners:
                if not np.allclose(self(t0, s0), (t0, s0), atol=1e-15):
                    raise NotDiffeo("reparametrization must fix the vertices")

    def inverse(self, u, w, iterations=60):
        """Solve ``Phi(t, s) = (u, w)`` by Newton's method from ``(u, w)``."""
        u, w = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(w, dtype=float))
        t, s = u.copy(), w.copy()
        for _ in range(iterations):
            phi, chi = self(t, s)
            r = np.stack([phi - u, chi - w], -1)
            step = np.linalg.solve(self.jacobian(t, s), r[..., None])[..., 0]
            t, s = np.clip(t - step[..., 0], 0, 1), np.clip(s - step[..., 1], 0, 1)
            if np.max(np.abs(step)) < 1e-15:
                break
        return t, s


class ReparametrizedSurface(SurfaceMap):
    """``Gamma o Phi`` with chain-rule partials."""

    def __init__(self, base: SurfaceMap, phi: Reparametrization):
        self.base, self.phi = base, phi
        self.family = f"{base.family}-reparam"

    def point(self, t, s):
        return self.base.point(*self.phi(t, s))

    def partials(self, t, s):
        u, w = self.phi(t, s)
        gu, gw = self.base.partials(u, w)
        J = self.phi.jacobian(t, s)
        dt = gu * J[..., 0, 0, None] + gw * J[..., 1, 0, None]
        ds = gu * J[..., 0, 1, None] + gw * J[..., 1, 1, None]
        return dt, ds


def reparametrize_surface(gamma, phi: Reparametrization, n_t=None, n_s=None) -> SurfaceGrid:
    """Sample ``Gamma o Phi``; ``gamma`` may be a SurfaceMap or a SurfaceGrid."""
    phi.check_diffeo()
    if isinstance(gamma, SurfaceGrid):
        n_t = gamma.n_t if n_t is None else n_t
        n_s = gamma.n_s if n_s is None else n_s
        gamma = gamma.surface_map()
    return ReparametrizedSurface(gamma, phi).sample(n_t, n_s if n_s is not None else n_t)


@dataclass(frozen=True, eq=False)
class ReparamReport:
    residual: float
    frame_residual: float
    point_residual: float
    fake_curvature: float
    mode: str


def _end_path(Abar, A, B, cm, grid):
    frames = row_holonomies(Abar, grid)
    c = omega_transport_local(Abar, A, B, cm, grid, frames)
    return frames[-1] @ c[-1], grid.points[-1]


def verify_reparam(Abar, A, B, cm, gamma: SurfaceMap, phi: Reparametrization,
                   n=200, enforce=True) -> ReparamReport:
    """Transport ``Gamma~_0 o Phi_0`` along ``(Gamma o Phi)_s`` and compare with ``Gamma~_1 o Phi_1``.

    Both endpoint paths (frames and base points) are interpolated onto a
    refined grid of ``4 n`` intervals before taking the sup norm.
    """
    grid = gamma.sample(n)
    fc = float(np.max(frob(fake_curvature(Abar, B, cm, grid.points))))
    if enforce:
        if fc > FAKE_FLAT_TOL:
            raise ConditionViolated(f"fake curvature {fc:.2e} exceeds {FAKE_FLAT_TOL:g}")
        if phi.mode == "ii" and not _same_connection(A, Abar):
            raise ConditionViolated("mode ii is only supported with A = Abar")
    frames, points = _end_path(Abar, A, B, cm, grid)
    frames_phi, points_phi = _end_path(Abar, A, B, cm, reparametrize_surface(gamma, phi, n, n))

    fine = np.linspace(0, 1, 4 * n + 1)
    u, _ = phi(fine, np.ones_like(fine))
    t = grid.t
    ref_frames = CubicSpline(t, frames, axis=0)(u)
    ref_points = CubicSpline(t, points, axis=0)(u)
    got_frames = CubicSpline(t, frames_phi, axis=0)(fine)
    got_points = CubicSpline(t, points_phi, axis=0)(fine)
    fr = float(np.max(frob(got_frames - ref_frames)))
    pr = float(np.max(np.linalg.norm(got_points - ref_points, axis=-1)))
    return ReparamReport(max(fr, pr), fr, pr, fc, phi.mode)


def _same_connection(A, Abar):
    return all(np.array_equal(x, y) for x, y in
               ((A.const, Abar.const), (A.linear, Abar.linear), (A.quad, Abar.quad)))


# ----------------------------------------------------------------------------
# demonstration: transporting part of each path


def half_surface_difference(Abar, A, B, cm, gamma: SurfaceMap, n=200):
    """omega-transport of the left halves ``Gamma_s|[0, 1/2]`` against the
    left halves of the transported full paths; returns the largest frame gap.
    """
    full = gamma.sample(n)
    half = gamma.restrict_t(0.0, 0.5).sample(n // 2 if (n // 2) % 2 == 0 else n, n)
    c_full = omega_transport_local(Abar, A, B, cm, full)
    c_half = omega_transport_local(Abar, A, B, cm, half)
    return float(np.max(frob(c_full - c_half)))
