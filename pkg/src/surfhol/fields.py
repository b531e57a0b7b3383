"""Connection 1-forms and LH-valued 2-forms on the plane, in the global trivialization.

A connection is stored through its components ``A_1(x), A_2(x)`` as a
polynomial of degree <= 2 in ``x`` with Lie-algebra coefficients, so the
partial derivatives are exact. A 2-form on the plane has a single component
``B_12(x)``; evaluated on a pair of vectors it is ``B_12 * (u1 v2 - u2 v1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FieldEvaluation, TauNotInvertible
from .liecore import MatrixGroup, commutator


def wedge(u, v):
    """Oriented area ``u1 v2 - u2 v1`` of two plane vectors (batched)."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _check_points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise FieldEvaluation(f"base points must have trailing dimension 2, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise FieldEvaluation("non-finite base point")
    return x


@dataclass(frozen=True, eq=False)
class ConnectionField:
    """``A_mu(x) = C_mu + x_nu D_mu,nu + (x1^2, x1 x2, x2^2) . E_mu``."""

    family: str
    group: MatrixGroup
    const: np.ndarray  # (2, n, n)
    linear: np.ndarray  # (2, 2, n, n), [mu, nu]
    quad: np.ndarray  # (2, 3, n, n)
    params: dict = field(default_factory=dict)

    def components(self, x):
        """``(A_1(x), A_2(x))`` stacked on axis -3."""
        x = _check_points(x)
        x1, x2 = x[..., 0], x[..., 1]
        mono = np.stack([x1 * x1, x1 * x2, x2 * x2], axis=-1)
        out = (
            self.const
            + np.einsum("...v,mvij->...mij", x, self.linear)
            + np.einsum("...q,mqij->...mij", mono, self.quad)
        )
        if not np.all(np.isfinite(out)):
            raise FieldEvaluation(f"{self.family}: non-finite connection value")
        return out

    def derivatives(self, x):
        """``d_nu A_mu(x)`` with axes ``[..., mu, nu, i, j]``."""
        x = _check_points(x)
        x1, x2 = x[..., 0, None, None, None], x[..., 1, None, None, None]
        E0, E1, E2 = self.quad[:, 0], self.quad[:, 1], self.quad[:, 2]
        d1 = self.linear[:, 0] + 2 * x1 * E0 + x2 * E1
        d2 = self.linear[:, 1] + x1 * E1 + 2 * x2 * E2
        return np.stack([d1, d2], axis=-3)

    def __call__(self, x, v):
        """Contract with tangent vectors: ``A_1(x) v1 + A_2(x) v2``."""
        comps = self.components(x)
        v = np.asarray(v, dtype=float)
        return np.einsum("...m,...mij->...ij", v, comps)

    def conjugated(self, g):
        """Transform by a constant gauge element: ``A -> g A g^-1``."""
        gi = self.group.inv(g)
        return ConnectionField(
            self.family + "-conj", self.group,
            g @ self.const @ gi, g @ self.linear @ gi, g @ self.quad @ gi, dict(self.params),
        )

    def __sub__(self, other):
        return ConnectionField(
            f"{self.family}-minus-{other.family}", self.group,
            self.const - other.const, self.linear - other.linear, self.quad - other.quad,
        )


@dataclass(frozen=True, eq=False)
class TwoFormField:
    family: str
    group: MatrixGroup
    evaluator: Callable
    params: dict = field(default_factory=dict)

    def component(self, x):
        x = _check_points(x)
        out = self.evaluator(x)
        if not np.all(np.isfinite(out)):
            raise FieldEvaluation(f"{self.family}: non-finite 2-form value")
        return out

    def __call__(self, x, u, v):
        """``B(u, v)`` at ``x`` for batched plane vectors ``u``, ``v``."""
        return wedge(u, v)[..., None, None] * self.component(x)


# ----------------------------------------------------------------------------
# constructors


def _zeros(group, *lead):
    n = group.size
    return np.zeros(tuple(lead) + (n, n), dtype=complex)


def poly2_connection(group, const=None, linear=None, quad=None, family="poly2", params=None):
    return ConnectionField(
        family, group,
        _zeros(group, 2) if const is None else np.asarray(const, dtype=complex),
        _zeros(group, 2, 2) if linear is None else np.asarray(linear, dtype=complex),
        _zeros(group, 2, 3) if quad is None else np.asarray(quad, dtype=complex),
        params or {},
    )


def zero_connection(group):
    return poly2_connection(group, family="zero")


def constant_connection(group, components):
    return poly2_connection(group, const=components, family="constant")


def affine_connection(group, const, linear):
    return poly2_connection(group, const=const, linear=linear, family="affine")


def landau_connection(group, b, generator=None):
    """``A = (0, b x1 T)``; curvature ``F_12 = b T`` is constant."""
    T = group.basis[0] if generator is None else np.asarray(generator, dtype=complex)
    linear = _zeros(group, 2, 2)
    linear[1, 0] = b * T
    return poly2_connection(group, linear=linear, family="landau", params={"b": b})


def random_poly2_connection(group, rng, scale=0.3):
    coeffs = scale * rng.standard_normal((2 + 4 + 6, group.dim))
    alg = group.from_coeffs(coeffs)
    return poly2_connection(
        group, alg[:2], alg[2:6].reshape(2, 2, group.size, group.size),
        alg[6:].reshape(2, 3, group.size, group.size), family="random-poly2",
        params={"scale": scale},
    )


def zero_two_form(group):
    return TwoFormField("zero", group, lambda x: _zeros(group, *x.shape[:-1]))


def constant_two_form(group, value):
    value = np.asarray(value, dtype=complex)
    return TwoFormField(
        "constant", group,
        lambda x: np.broadcast_to(value, x.shape[:-1] + value.shape).copy(),
        {"value": value},
    )


def poly2_two_form(group, const=None, linear=None, quad=None):
    c = _zeros(group) if const is None else np.asarray(const, dtype=complex)
    d = _zeros(group, 2) if linear is None else np.asarray(linear, dtype=complex)
    e = _zeros(group, 3) if quad is None else np.asarray(quad, dtype=complex)

    def evaluator(x):
        x1, x2 = x[..., 0], x[..., 1]
        mono = np.stack([x1 * x1, x1 * x2, x2 * x2], axis=-1)
        return c + np.einsum("...v,vij->...ij", x, d) + np.einsum("...q,qij->...ij", mono, e)

    return TwoFormField("poly2", group, evaluator)


def curvature(A: ConnectionField, x):
    """``F_12 = d1 A2 - d2 A1 + [A1, A2]`` at the points ``x``."""
    comps = A.components(x)
    der = A.derivatives(x)
    return der[..., 1, 0, :, :] - der[..., 0, 1, :, :] + commutator(comps[..., 0, :, :], comps[..., 1, :, :])


def fake_curvature(Abar: ConnectionField, B: TwoFormField, cm, x):
    """``F^Abar_12 + tau(B_12)`` in LG."""
    return curvature(Abar, x) + cm.tau_alg(B.component(x))


def make_flatting_B(Abar: ConnectionField, cm, offset=None) -> TwoFormField:
    """The 2-form with ``tau(B) = -F^Abar`` (plus an optional constant offset in LH).

    Needs tau invertible at the Lie algebra level; the identity family always is.
    """
    if cm.tau_is_identity:
        inverse = None
    elif cm.tau_alg_inverse is not None:
        inverse = cm.tau_alg_inverse
    else:
        raise TauNotInvertible(f"crossed module {cm.name!r}: tau has no inverse on the Lie algebra")
    off = None if offset is None else np.asarray(offset, dtype=complex)

    def evaluator(x):
        F = curvature(Abar, x)
        out = -F if inverse is None else inverse(-F)
        return out if off is None else out + off

    family = "flatting" if off is None else "flatting-perturbed"
    return TwoFormField(family, cm.H, evaluator, {"offset": off})
