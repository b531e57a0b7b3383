"""Sampled paths, horizontal lifts, Chen integrals and the path-space connection omega(A, B).

Conventions in the trivialization ``P = R^2 x G`` with section ``sigma(x) = (x, e)``:

* a lifted path is stored through its frame ``abar(t)``, the point over
  ``gamma(t)`` being ``sigma(gamma(t)) abar(t)``;
* a tangent vector to the space of horizontal paths is stored as the base
  field ``v(t)`` plus its vertical part ``w(t) = Abar(v~(t))`` in LG. The
  vertical generator of ``v~(t)`` relative to the frame is then
  ``w(t) - Ad(abar^-1) Abar_sigma(v(t))``;
* any equivariant form ``C`` is evaluated on lifted data as
  ``Ad(abar^-1) C_sigma`` (``alpha(abar^-1) C_sigma`` for LH-valued forms).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GridMismatch, VariationTooCoarse
from .fields import ConnectionField, TwoFormField, curvature, wedge
from .liecore import commutator, conj, frob
from .quadrature import cumulative_simpson, simpson, simpson_weights, transport

FD_STEP = 1e-3


def central_difference(fn, step=FD_STEP):
    """Five-point derivative of ``fn`` at 0."""
    return (-fn(2 * step) + 8 * fn(step) - 8 * fn(-step) + fn(-2 * step)) / (12 * step)


# ----------------------------------------------------------------------------
# path and vector-field families


class PathMap:
    """Closed-form path ``[0, 1] -> R^2`` with analytic velocity."""

    family = "path"

    def point(self, t):
        raise NotImplementedError

    def velocity(self, t):
        raise NotImplementedError

    def sample(self, n):
        t = np.linspace(0.0, 1.0, n + 1)
        return SampledPath(t, self.point(t), self.velocity(t))

    def restrict(self, t0, t1):
        return RestrictedPath(self, t0, t1)

    def reversed(self):
        return RestrictedPath(self, 1.0, 0.0)


class Segment(PathMap):
    family = "segment"

    def __init__(self, start, end):
        self.start = np.asarray(start, dtype=float)
        self.end = np.asarray(end, dtype=float)

    def point(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        return self.start + t * (self.end - self.start)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self.end - self.start, t.shape + (2,)).copy()


class Arc(PathMap):
    family = "arc"

    def __init__(self, center, radius, angle0, angle1):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.angle0, self.angle1 = float(angle0), float(angle1)

    def point(self, t):
        th = self.angle0 + np.asarray(t, dtype=float) * (self.angle1 - self.angle0)
        return self.center + self.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def velocity(self, t):
        dth = self.angle1 - self.angle0
        th = self.angle0 + np.asarray(t, dtype=float) * dth
        return self.radius * dth * np.stack([-np.sin(th), np.cos(th)], axis=-1)


class CubicBezier(PathMap):
    family = "cubic"

    def __init__(self, control):
        self.control = np.asarray(control, dtype=float)
        if self.control.shape != (4, 2):
            raise ValueError("cubic path needs 4 control points")

    def point(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        p0, p1, p2, p3 = self.control
        u = 1 - t
        return u**3 * p0 + 3 * u**2 * t * p1 + 3 * u * t**2 * p2 + t**3 * p3

    def velocity(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        p0, p1, p2, p3 = self.control
        u = 1 - t
        return 3 * u**2 * (p1 - p0) + 6 * u * t * (p2 - p1) + 3 * t**2 * (p3 - p2)


class SplinePath(PathMap):
    """Path through user-supplied points, interpolated by a cubic spline."""

    family = "points"

    def __init__(self, t, x):
        self.spline = CubicSpline(np.asarray(t, dtype=float), np.asarray(x, dtype=float), axis=0)
        self.derivative = self.spline.derivative()

    def point(self, t):
        return self.spline(np.asarray(t, dtype=float))

    def velocity(self, t):
        return self.derivative(np.asarray(t, dtype=float))


class RestrictedPath(PathMap):
    """``u -> base(t0 + u (t1 - t0))``; ``t1 < t0`` runs the base backwards."""

    def __init__(self, base, t0, t1):
        self.base, self.t0, self.t1 = base, float(t0), float(t1)
        self.family = f"{base.family}[{t0:g},{t1:g}]"

    def point(self, t):
        return self.base.point(self.t0 + np.asarray(t, dtype=float) * (self.t1 - self.t0))

    def velocity(self, t):
        u = self.t0 + np.asarray(t, dtype=float) * (self.t1 - self.t0)
        return (self.t1 - self.t0) * self.base.velocity(u)


class VectorFieldMap:
    """A vector field ``t -> v(t)`` along a path, with analytic t-derivative."""

    def __init__(self, value, derivative, family):
        self._value, self._derivative, self.family = value, derivative, family

    def value(self, t):
        return self._value(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self._derivative(np.asarray(t, dtype=float))

    def sample(self, gamma):
        return TangentField(gamma, self.value(gamma.t), self.derivative(gamma.t))

    @classmethod
    def constant(cls, vector):
        v = np.asarray(vector, dtype=float)
        return cls(lambda t: np.broadcast_to(v, t.shape + (2,)).copy(),
                   lambda t: np.zeros(t.shape + (2,)), "constant")

    @classmethod
    def linear(cls, start, end):
        v0, v1 = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
        return cls(lambda t: v0 + t[..., None] * (v1 - v0),
                   lambda t: np.broadcast_to(v1 - v0, t.shape + (2,)).copy(), "linear")

    @classmethod
    def sine(cls, vector, k=1.0):
        v = np.asarray(vector, dtype=float)
        return cls(lambda t: np.sin(k * np.pi * t)[..., None] * v,
                   lambda t: (k * np.pi * np.cos(k * np.pi * t))[..., None] * v, "sine")


# ----------------------------------------------------------------------------
# sampled data


@dataclass(frozen=True, eq=False)
class SampledPath:
    t: np.ndarray
    points: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        n = len(t) - 1
        if n < 2 or n % 2:
            raise GridMismatch(f"path grid needs an even number >= 2 of intervals, got {n}")
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise GridMismatch("path grid must increase strictly from 0 to 1")
        if not np.allclose(np.diff(t), 1.0 / n, rtol=1e-9, atol=1e-12):
            raise GridMismatch("path grid must be uniform")
        if self.points.shape != (n + 1, 2) or self.velocity.shape != (n + 1, 2):
            raise GridMismatch("points/velocity must have shape (N+1, 2)")

    @property
    def n(self):
        return len(self.t) - 1

    @property
    def dt(self):
        return 1.0 / self.n

    @classmethod
    def from_points(cls, t, points):
        """Raw point list; velocities by second-order finite differences."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(points, dtype=float)
        return cls(t, x, np.gradient(x, t, axis=0, edge_order=2))

    def displaced(self, *pairs):
        """``gamma + sum s_k X_k`` for (step, TangentField) pairs."""
        pts, vel = self.points.copy(), self.velocity.copy()
        for step, field in pairs:
            pts = pts + step * field.vectors
            vel = vel + step * field.derivative_or_fd()
        return SampledPath(self.t, pts, vel)


@dataclass(frozen=True, eq=False)
class TangentField:
    along: SampledPath
    vectors: np.ndarray
    derivative: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.vectors.shape != self.along.points.shape:
            raise GridMismatch("tangent field length does not match its path")

    def derivative_or_fd(self):
        if self.derivative is not None:
            return self.derivative
        return np.gradient(self.vectors, self.along.t, axis=0, edge_order=2)

    def __add__(self, other):
        _same_grid(self.along, other.along)
        return TangentField(self.along, self.vectors + other.vectors,
                            self.derivative_or_fd() + other.derivative_or_fd())

    def __mul__(self, c):
        return TangentField(self.along, c * self.vectors, c * self.derivative_or_fd())

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class LiftedPath:
    base: SampledPath
    frame: np.ndarray  # (N+1, n, n), abar(t)
    group: object

    def translated(self, g):
        """Right translation by a constant ``g``."""
        return LiftedPath(self.base, self.frame @ g, self.group)


@dataclass(frozen=True, eq=False)
class LiftedTangentField:
    along: LiftedPath
    horizontal_part: np.ndarray  # (N+1, 2): projection v(t)
    vertical_part: np.ndarray  # (N+1, n, n): w(t) = Abar(v~(t))

    def translated(self, g):
        """Push-forward under right translation: ``w -> Ad(g^-1) w``."""
        G = self.along.group
        return LiftedTangentField(
            self.along.translated(g), self.horizontal_part,
            G.inv(g) @ self.vertical_part @ g,
        )


def _same_grid(a, b):
    if a is b:
        return
    if a.n != b.n or not np.allclose(a.points, b.points):
        raise GridMismatch("fields live on different paths or grids")


# ----------------------------------------------------------------------------
# holonomy and lifts


def path_holonomy(Abar: ConnectionField, gamma: SampledPath) -> LiftedPath:
    """Frames ``abar(t)`` solving ``abar' = -Abar_sigma(gamma') abar``, ``abar(0) = e``."""
    xi = Abar(gamma.points, gamma.velocity)
    return LiftedPath(gamma, transport(Abar.group, xi, gamma.dt), Abar.group)


def horizontal_lift_path(Abar, gamma, seed=None) -> LiftedPath:
    lift = path_holonomy(Abar, gamma)
    return lift if seed is None else lift.translated(seed)


def _transported_curvature(Abar, lifted, v):
    """``Ad(abar^-1) F^Abar_sigma(gamma', v)`` along the path."""
    gamma = lifted.base
    F = curvature(Abar, gamma.points)
    area = wedge(gamma.velocity, v)[:, None, None]
    return conj(lifted.group.inv(lifted.frame), area * F, lifted.group)


def lift_tangent_field(Abar, gammaTilde: LiftedPath, v: TangentField, w0) -> LiftedTangentField:
    """Integrate the tangency condition ``dw/dt = F^Abar(gamma~', v~)`` from ``w(0) = w0``."""
    _same_grid(gammaTilde.base, v.along)
    f = _transported_curvature(Abar, gammaTilde, v.vectors)
    w = np.asarray(w0, dtype=complex) + cumulative_simpson(f, gammaTilde.base.dt)
    return LiftedTangentField(gammaTilde, v.vectors, w)


def sigma_lift_tangent_field(Abar, gammaTilde, v) -> LiftedTangentField:
    """The lift whose initial value is ``sigma_* v(0)`` moved to the lifted start point."""
    g0 = gammaTilde.frame[0]
    w0 = conj(gammaTilde.group.inv(g0), Abar(v.along.points[0], v.vectors[0]), gammaTilde.group)
    return lift_tangent_field(Abar, gammaTilde, v, w0)


def lift_variation_derivative(Abar, gamma, v, seed=None, step=FD_STEP):
    """Frames of the lift of ``gamma`` and their derivative along ``gamma + s v``."""

    def frames(s):
        return horizontal_lift_path(Abar, gamma.displaced((s, v)), seed).frame

    return frames(0.0), central_difference(frames, step)


def tangent_field_from_variation(Abar, gamma, v, seed=None, step=FD_STEP) -> LiftedTangentField:
    """``d/ds`` of the horizontal lifts of ``gamma + s v`` at ``s = 0``.

    This is the geometric tangent vector, built without using the tangency
    equation, so it serves as an independent input to :func:`stokes_residual`.
    """
    frame, dframe = lift_variation_derivative(Abar, gamma, v, seed, step)
    G = Abar.group
    fi = G.inv(frame)
    w = conj(fi, Abar(gamma.points, v.vectors), G) + fi @ dframe
    return LiftedTangentField(LiftedPath(gamma, frame, G), v.vectors, w)


def holonomy_variation(Abar, gamma, v, step=FD_STEP):
    """``abar(1)^-1 d/ds abar(1)`` for the variation ``gamma + s v``."""
    frame, dframe = lift_variation_derivative(Abar, gamma, v, None, step)
    return Abar.group.inv(frame[-1]) @ dframe[-1]


def _node_index(gamma, T):
    idx = int(round(T * gamma.n))
    if abs(gamma.t[idx] - T) > 1e-12:
        raise GridMismatch(f"T={T} is not a grid node")
    return idx


def stokes_residual(Abar, gammaTilde, vTilde: LiftedTangentField, T=1.0):
    """``|| Abar(v~(T)) - Abar(v~(0)) - int_0^T F^Abar(gamma~', v~) dt ||``."""
    _same_grid(gammaTilde.base, vTilde.along.base)
    idx = _node_index(gammaTilde.base, T)
    f = _transported_curvature(Abar, gammaTilde, vTilde.horizontal_part)
    integral = cumulative_simpson(f, gammaTilde.base.dt)[idx]
    w = vTilde.vertical_part
    return float(frob(w[idx] - w[0] - integral))


# ----------------------------------------------------------------------------
# Chen integrals, theta, omega


def _b_integrand(B: TwoFormField, cm, lifted, v):
    """``alpha(abar^-1) B_sigma(gamma', v)`` at each node, in LH."""
    gamma = lifted.base
    b = B(gamma.points, gamma.velocity, v)
    return cm.alpha_alg(lifted.group.inv(lifted.frame), b)


def chen_integral_2form(B, cm, gammaTilde, vTilde: LiftedTangentField):
    """``Z(v~) = int_0^1 B(gamma~', v~) dt``; only the base part of ``v~`` enters."""
    _same_grid(gammaTilde.base, vTilde.along.base)
    f = _b_integrand(B, cm, gammaTilde, vTilde.horizontal_part)
    return simpson(f, gammaTilde.base.dt)


def theta_eval(B, cm, Abar, gamma, v: TangentField, seed=None):
    lifted = horizontal_lift_path(Abar, gamma, seed)
    return simpson(_b_integrand(B, cm, lifted, v.vectors), gamma.dt)


def _endpoint_A(A, Abar, lifted, v1, w1):
    """``A(v~(1))`` from the base vector and the vertical part ``w(1)``."""
    G = lifted.group
    g1 = lifted.frame[-1]
    x1 = lifted.base.points[-1]
    return conj(G.inv(g1), A(x1, v1) - Abar(x1, v1), G) + w1


def omega_eval(A, Abar, B, cm, gammaTilde, vTilde: LiftedTangentField):
    """``omega(v~) = A(v~(1)) + tau(Z(v~))``."""
    Z = chen_integral_2form(B, cm, gammaTilde, vTilde)
    endpoint = _endpoint_A(A, Abar, gammaTilde, vTilde.horizontal_part[-1], vTilde.vertical_part[-1])
    return endpoint + cm.tau_alg(Z)


def omega_local_eval(A, Abar, B, cm, gamma, v: TangentField):
    """Pull-back of omega by the section of horizontal lifts starting on ``sigma``.

    Evaluated as
    ``A(v(0)) + [Ad(abar(1)^-1)(A - Abar)(v(1)) - (A - Abar)(v(0))]
    + int Ad(abar^-1)(F^Abar + tau B)(gamma', v) dt``.
    """
    lifted = path_holonomy(Abar, gamma)
    G = Abar.group
    x0, x1 = gamma.points[0], gamma.points[-1]
    v0, v1 = v.vectors[0], v.vectors[-1]
    diff1 = conj(G.inv(lifted.frame[-1]), A(x1, v1) - Abar(x1, v1), G)
    diff0 = A(x0, v0) - Abar(x0, v0)
    curv = _transported_curvature(Abar, lifted, v.vectors)
    tb = cm.tau_alg(_b_integrand(B, cm, lifted, v.vectors))
    return A(x0, v0) + (diff1 - diff0) + simpson(curv + tb, gamma.dt)


def omega_local_endpoint_form(A, Abar, B, cm, gamma, v: TangentField):
    """``Ad(abar(1)^-1) A_sigma(v(1)) + int Ad(abar^-1) tau B_sigma(gamma', v) dt``.

    This expression leaves out the vertical contribution
    ``abar(1)^-1 d_s abar(1)`` of the lifted variation at the endpoint; adding
    :func:`holonomy_variation` recovers :func:`omega_local_eval`.
    """
    lifted = path_holonomy(Abar, gamma)
    G = Abar.group
    head = conj(G.inv(lifted.frame[-1]), A(gamma.points[-1], v.vectors[-1]), G)
    tb = cm.tau_alg(_b_integrand(B, cm, lifted, v.vectors))
    return head + simpson(tb, gamma.dt)


def omega_horizontal_lift(A, Abar, B, cm, gammaTilde, v: TangentField) -> LiftedTangentField:
    """The omega-horizontal lift of ``v`` along ``gammaTilde``.

    ``X = A(v~(1)) = -int Ad(abar^-1) tau B(gamma', v)``; the endpoint vertical
    part follows from splitting ``v~(1)`` relative to ``A``, and ``w(t)`` is
    obtained by integrating the tangency condition backwards from ``t = 1``.
    """
    _same_grid(gammaTilde.base, v.along)
    G = gammaTilde.group
    dt = gammaTilde.base.dt
    X = -cm.tau_alg(simpson(_b_integrand(B, cm, gammaTilde, v.vectors), dt))
    x1, v1 = gammaTilde.base.points[-1], v.vectors[-1]
    w1 = conj(G.inv(gammaTilde.frame[-1]), Abar(x1, v1) - A(x1, v1), G) + X
    prefix = cumulative_simpson(_transported_curvature(Abar, gammaTilde, v.vectors), dt)
    w = w1 - (prefix[-1] - prefix)
    return LiftedTangentField(gammaTilde, v.vectors, w)


def chen_product_2form(B1, B2, cm, gammaTilde, X: LiftedTangentField, Y: LiftedTangentField):
    """``int int [tau B1(gamma~'(u), X(u)), tau B2(gamma~'(v), Y(v))] du dv``."""
    _same_grid(X.along.base, Y.along.base)
    _same_grid(gammaTilde.base, X.along.base)
    f = cm.tau_alg(_b_integrand(B1, cm, gammaTilde, X.horizontal_part))
    g = cm.tau_alg(_b_integrand(B2, cm, gammaTilde, Y.horizontal_part))
    w = simpson_weights(gammaTilde.base.n, gammaTilde.base.dt)
    fg = np.einsum("u,uij,v,vjk->ik", w, f, w, g)
    gf = np.einsum("v,vij,u,ujk->ik", w, g, w, f)
    return fg - gf


# ----------------------------------------------------------------------------
# curvature of omega


@dataclass(frozen=True)
class CurvatureTerms:
    endpoint: np.ndarray  # ev_1^* F^A
    d_term: np.ndarray  # d(int tau B), finite differences along the variation ("FD-d")
    mixed: np.ndarray  # [ev_1^* A ^ int tau B]
    product: np.ndarray  # (int)^2 [tau B ^ tau B]
    method: str = "FD-d"

    @property
    def total(self):
        return self.endpoint + self.d_term + self.mixed + self.product


def _check_variation(X, Y, step):
    scale = max(np.max(np.abs(X.vectors)), np.max(np.abs(Y.vectors)))
    if step <= 0 or (scale > 0 and step * scale < 1e-7):
        raise VariationTooCoarse(f"finite-difference step {step:g} below resolvable displacement")


def omega_curvature_eval(A, Abar, B, cm, gamma, X: TangentField, Y: TangentField, step=FD_STEP):
    """Curvature of omega on the lifts of the coordinate fields of ``gamma + s1 X + s2 Y``."""
    _check_variation(X, Y, step)
    G = Abar.group

    def theta(s1, s2, direction):
        g = gamma.displaced((s1, X), (s2, Y))
        lifted = path_holonomy(Abar, g)
        return cm.tau_alg(simpson(_b_integrand(B, cm, lifted, direction.vectors), g.dt))

    d_term = (central_difference(lambda s: theta(s, 0.0, Y), step)
              - central_difference(lambda s: theta(0.0, s, X), step))

    lifted = path_holonomy(Abar, gamma)
    g1i = G.inv(lifted.frame[-1])
    x1 = gamma.points[-1]
    A_X = conj(g1i, A(x1, X.vectors[-1]), G) + holonomy_variation(Abar, gamma, X, step)
    A_Y = conj(g1i, A(x1, Y.vectors[-1]), G) + holonomy_variation(Abar, gamma, Y, step)
    th_X, th_Y = theta(0.0, 0.0, X), theta(0.0, 0.0, Y)
    mixed = commutator(A_X, th_Y) - commutator(A_Y, th_X)

    endpoint = conj(g1i, curvature(A, x1) * wedge(X.vectors[-1], Y.vectors[-1]), G)

    Xt = sigma_lift_tangent_field(Abar, lifted, X)
    Yt = sigma_lift_tangent_field(Abar, lifted, Y)
    product = chen_product_2form(B, B, cm, lifted, Xt, Yt)
    return CurvatureTerms(endpoint, d_term, mixed, product)


def omega_curvature_direct(A, Abar, B, cm, gamma, X, Y, step=FD_STEP):
    """``d omega + [omega, omega]`` with ``d`` taken by finite differences of the pulled-back form."""
    _check_variation(X, Y, step)

    def omega(s1, s2, direction):
        g = gamma.displaced((s1, X), (s2, Y))
        field = TangentField(g, direction.vectors, direction.derivative_or_fd())
        return omega_local_eval(A, Abar, B, cm, g, field)

    d = (central_difference(lambda s: omega(s, 0.0, Y), step)
         - central_difference(lambda s: omega(0.0, s, X), step))
    return d + commutator(omega(0.0, 0.0, X), omega(0.0, 0.0, Y))


# ----------------------------------------------------------------------------
# demonstration: transporting part of a path


def half_path_difference(A, Abar, B, cm, path: PathMap, field: VectorFieldMap, n=200):
    """Compare the omega-horizontal lift over the whole path, restricted to its
    left half, with the omega-horizontal lift of the left half alone.

    Returns the largest difference of the vertical parts on the shared half.
    """
    if n % 4:
        raise GridMismatch("n must be divisible by 4 so the half path has an even grid")
    full = path.sample(n)
    full_lift = omega_horizontal_lift(A, Abar, B, cm, path_holonomy(Abar, full), field.sample(full))
    half_path = path.restrict(0.0, 0.5).sample(n // 2)
    half_field = TangentField(half_path, field.value(0.5 * half_path.t))
    half_lift = omega_horizontal_lift(A, Abar, B, cm, path_holonomy(Abar, half_path), half_field)
    diff = full_lift.vertical_part[: n // 2 + 1] - half_lift.vertical_part
    return float(np.max(frob(diff)))
