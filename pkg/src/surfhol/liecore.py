"""Matrix Lie groups, their algebras, and crossed modules (G, H, tau, alpha).

Everything is stored as complex ``numpy`` arrays of shape ``(..., n, n)`` so
that transport code can push whole batches of frames through ``exp`` at once.
The tagged :class:`GroupElement` / :class:`AlgebraElement` wrappers exist for
the public single-element API and carry tag checking.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm, logm
from scipy.spatial.transform import Rotation

from .errors import LogDomain, NonFinite, TagMismatch

LOG_RADIUS = 1.9

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# (L_k)_{ij} = -eps_{kij}
SO3_BASIS = np.zeros((3, 3, 3), dtype=complex)
for _k, (_i, _j) in enumerate([(1, 2), (2, 0), (0, 1)]):
    SO3_BASIS[_k, _i, _j] = -1.0
    SO3_BASIS[_k, _j, _i] = 1.0


def frob(x):
    """Frobenius norm over the two trailing axes."""
    return np.linalg.norm(x, axis=(-2, -1))


def dagger(x):
    return np.conj(np.swapaxes(x, -1, -2))


def commutator(x, y):
    return x @ y - y @ x


class MatrixGroup:
    """A closed subgroup of GL(n, C) with a fixed real basis of its algebra."""

    tag: str = "GL"
    size: int = 1
    basis: np.ndarray = np.zeros((0, 1, 1), dtype=complex)
    abelian: bool = False
    unitary: bool = True

    @property
    def algebra_tag(self):
        return self.tag.lower()

    @property
    def dim(self):
        return self.basis.shape[0]

    def identity(self, shape=()):
        out = np.zeros(tuple(shape) + (self.size, self.size), dtype=complex)
        out[..., np.arange(self.size), np.arange(self.size)] = 1.0
        return out

    def zero(self, shape=()):
        return np.zeros(tuple(shape) + (self.size, self.size), dtype=complex)

    # overridden with closed forms where available
    def exp(self, X):
        X = np.asarray(X, dtype=complex)
        flat = X.reshape(-1, self.size, self.size)
        return np.stack([expm(m) for m in flat]).reshape(X.shape)

    def log(self, g):
        g = np.asarray(g, dtype=complex)
        self._check_log_domain(g)
        flat = g.reshape(-1, self.size, self.size)
        return np.stack([logm(m) for m in flat]).reshape(g.shape)

    def inv(self, g):
        if self.unitary:
            return dagger(g)
        return np.linalg.inv(g)

    def _check_log_domain(self, g):
        dist = np.linalg.norm(g - self.identity(), ord=2, axis=(-2, -1))
        if np.any(dist >= LOG_RADIUS):
            raise LogDomain(
                f"{self.tag}: ||g - I|| = {np.max(dist):.3f} exceeds log radius {LOG_RADIUS}"
            )

    def group_residual(self, g):
        """Largest violation of the defining relations over a batch."""
        g = np.asarray(g, dtype=complex)
        res = frob(dagger(g) @ g - self.identity())
        return float(np.max(res))

    def algebra_residual(self, X):
        X = np.asarray(X, dtype=complex)
        proj = self.from_coeffs(self.coeffs(X))
        return float(np.max(frob(X - proj)))

    def from_coeffs(self, c):
        c = np.asarray(c, dtype=float)
        return np.einsum("...k,kij->...ij", c, self.basis)

    def coeffs(self, X):
        X = np.asarray(X, dtype=complex)
        flat = self.basis.reshape(self.dim, -1)
        real = np.concatenate([flat.real, flat.imag], axis=1)  # (k, 2 n^2)
        xf = X.reshape(X.shape[:-2] + (-1,))
        xr = np.concatenate([xf.real, xf.imag], axis=-1)
        return xr @ np.linalg.pinv(real)

    def random_algebra(self, rng, scale=1.0, size=()):
        shape = tuple(np.atleast_1d(size)) if size != () else ()
        return self.from_coeffs(scale * rng.standard_normal(shape + (self.dim,)))

    def random(self, rng, scale=1.0, size=()):
        return self.exp(self.random_algebra(rng, scale, size))

    def __repr__(self):
        return f"{type(self).__name__}()"


class U1(MatrixGroup):
    tag = "U1"
    size = 1
    basis = np.array([[[1j]]])
    abelian = True

    def exp(self, X):
        return np.exp(np.asarray(X, dtype=complex))

    def log(self, g):
        g = np.asarray(g, dtype=complex)
        self._check_log_domain(g)
        return 1j * np.angle(g)


class SO2(MatrixGroup):
    tag = "SO2"
    size = 2
    basis = np.array([[[0, -1], [1, 0]]], dtype=complex)
    abelian = True

    def exp(self, X):
        X = np.asarray(X, dtype=complex)
        theta = 0.5 * (X[..., 1, 0] - X[..., 0, 1]).real
        c, s = np.cos(theta), np.sin(theta)
        out = np.empty(X.shape, dtype=complex)
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
        return out

    def log(self, g):
        g = np.asarray(g, dtype=complex)
        self._check_log_domain(g)
        theta = np.arctan2(g[..., 1, 0].real, g[..., 0, 0].real)
        return theta[..., None, None] * self.basis[0]

    def group_residual(self, g):
        g = np.asarray(g, dtype=complex)
        det = np.linalg.det(g)
        return max(super().group_residual(g), float(np.max(np.abs(det - 1))),
                   float(np.max(np.abs(g.imag))))


class SU2(MatrixGroup):
    tag = "SU2"
    size = 2
    basis = 0.5j * PAULI

    def exp(self, X):
        X = np.asarray(X, dtype=complex)
        # X^2 = -det(X) I for traceless 2x2; det(X) = r^2 >= 0 on su(2)
        r = np.sqrt(np.maximum(np.linalg.det(X).real, 0.0))
        cos = np.cos(r)[..., None, None]
        sinc = np.sinc(r / np.pi)[..., None, None]
        return cos * self.identity() + sinc * X

    def log(self, g):
        g = np.asarray(g, dtype=complex)
        self._check_log_domain(g)
        half_tr = np.clip(0.5 * np.trace(g, axis1=-2, axis2=-1).real, -1.0, 1.0)
        r = np.arccos(half_tr)
        anti = 0.5 * (g - dagger(g))
        return anti / np.sinc(r / np.pi)[..., None, None]

    def group_residual(self, g):
        g = np.asarray(g, dtype=complex)
        det = np.linalg.det(g)
        return max(super().group_residual(g), float(np.max(np.abs(det - 1))))


class SO3(MatrixGroup):
    tag = "SO3"
    size = 3
    basis = SO3_BASIS

    @staticmethod
    def _vee(X):
        return np.stack([X[..., 2, 1], X[..., 0, 2], X[..., 1, 0]], axis=-1).real

    def exp(self, X):
        X = np.asarray(X, dtype=complex)
        theta = np.linalg.norm(self._vee(X), axis=-1)
        a = np.sinc(theta / np.pi)[..., None, None]
        b = 0.5 * np.sinc(theta / (2 * np.pi))[..., None, None] ** 2
        return self.identity() + a * X + b * (X @ X)

    def log(self, g):
        g = np.asarray(g, dtype=complex)
        self._check_log_domain(g)
        cos = np.clip(0.5 * (np.trace(g, axis1=-2, axis2=-1).real - 1.0), -1.0, 1.0)
        theta = np.arccos(cos)
        return 0.5 * (g - np.swapaxes(g, -1, -2)) / np.sinc(theta / np.pi)[..., None, None]

    def group_residual(self, g):
        g = np.asarray(g, dtype=complex)
        det = np.linalg.det(g)
        return max(super().group_residual(g), float(np.max(np.abs(det - 1))),
                   float(np.max(np.abs(g.imag))))


class R3(MatrixGroup):
    """Additive group R^3 realised as unipotent 4x4 translation matrices."""

    tag = "R3"
    size = 4
    abelian = True
    unitary = False

    basis = np.zeros((3, 4, 4), dtype=complex)
    for _k in range(3):
        basis[_k, _k, 3] = 1.0

    def exp(self, X):
        return self.identity() + np.asarray(X, dtype=complex)

    def log(self, g):
        g = np.asarray(g, dtype=complex)
        self._check_log_domain(g)
        return g - self.identity()

    def inv(self, g):
        return 2 * self.identity() - np.asarray(g, dtype=complex)

    def group_residual(self, g):
        g = np.asarray(g, dtype=complex)
        dev = g - self.identity()
        dev[..., :3, 3] = 1j * dev[..., :3, 3].imag
        return float(np.max(frob(dev)))


class ProductGroup(MatrixGroup):
    """Direct product realised block-diagonally."""

    def __init__(self, factors):
        self.factors = tuple(factors)
        self.tag = "x".join(f.tag for f in self.factors)
        self.size = sum(f.size for f in self.factors)
        self.abelian = all(f.abelian for f in self.factors)
        self.unitary = all(f.unitary for f in self.factors)
        blocks = []
        for f in self.factors:
            for b in f.basis:
                blocks.append(self._embed_one(f, b))
        self.basis = np.array(blocks)

    def _offsets(self):
        off = 0
        for f in self.factors:
            yield f, off
            off += f.size

    def _embed_one(self, factor, m):
        out = np.zeros((self.size, self.size), dtype=complex)
        for f, off in self._offsets():
            if f is factor:
                out[off:off + f.size, off:off + f.size] = m
                return out
        raise ValueError("unknown factor")

    def _blockwise(self, x, fn):
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape, dtype=complex)
        for f, off in self._offsets():
            sl = slice(off, off + f.size)
            out[..., sl, sl] = getattr(f, fn)(x[..., sl, sl])
        return out

    def exp(self, X):
        return self._blockwise(X, "exp")

    def log(self, g):
        self._check_log_domain(g)
        return self._blockwise(g, "log")

    def inv(self, g):
        return self._blockwise(g, "inv")

    def group_residual(self, g):
        g = np.asarray(g, dtype=complex)
        worst = 0.0
        for f, off in self._offsets():
            sl = slice(off, off + f.size)
            worst = max(worst, f.group_residual(g[..., sl, sl]))
        mask = np.ones((self.size, self.size), dtype=bool)
        for f, off in self._offsets():
            mask[off:off + f.size, off:off + f.size] = False
        if mask.any():
            worst = max(worst, float(np.max(np.abs(g[..., mask]))))
        return worst

    def __repr__(self):
        return f"ProductGroup({list(self.factors)})"


_SIMPLE_GROUPS = {cls.tag: cls for cls in (U1, SO2, SU2, SO3, R3)}
_GROUP_CACHE: dict = {}


def get_group(tag):
    """Look up a group by tag; ``"SU2xU1"`` builds a block-diagonal product."""
    if tag in _GROUP_CACHE:
        return _GROUP_CACHE[tag]
    parts = tag.split("x")
    try:
        factors = [_SIMPLE_GROUPS[p]() for p in parts]
    except KeyError:
        raise TagMismatch(f"unknown group tag {tag!r}") from None
    group = factors[0] if len(factors) == 1 else ProductGroup(factors)
    _GROUP_CACHE[tag] = group
    return group


# ----------------------------------------------------------------------------
# tagged single elements


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    group: MatrixGroup

    @property
    def group_tag(self):
        return self.group.tag

    def __matmul__(self, other):
        _same_tag(self.group_tag, other.group_tag)
        return GroupElement(self.matrix @ other.matrix, self.group)

    def inverse(self):
        return GroupElement(self.group.inv(self.matrix), self.group)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    matrix: np.ndarray
    group: MatrixGroup

    @property
    def algebra_tag(self):
        return self.group.algebra_tag

    def __add__(self, other):
        _same_tag(self.algebra_tag, other.algebra_tag)
        return AlgebraElement(self.matrix + other.matrix, self.group)

    def __mul__(self, scalar):
        return AlgebraElement(scalar * self.matrix, self.group)

    __rmul__ = __mul__


def _same_tag(a, b):
    if a != b:
        raise TagMismatch(f"tag mismatch: {a!r} vs {b!r}")


def _finite(m, what):
    if not np.all(np.isfinite(m)):
        raise NonFinite(f"non-finite entries in {what}")


def exp(X: AlgebraElement) -> GroupElement:
    _finite(X.matrix, "algebra element")
    return GroupElement(X.group.exp(X.matrix), X.group)


def log(g: GroupElement) -> AlgebraElement:
    _finite(g.matrix, "group element")
    return AlgebraElement(g.group.log(g.matrix), g.group)


def ad_action(g: GroupElement, X: AlgebraElement) -> AlgebraElement:
    """Adjoint action g X g^-1."""
    _same_tag(g.group.algebra_tag, X.algebra_tag)
    return AlgebraElement(g.matrix @ X.matrix @ g.group.inv(g.matrix), X.group)


def bracket(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    _same_tag(X.algebra_tag, Y.algebra_tag)
    return AlgebraElement(commutator(X.matrix, Y.matrix), X.group)


def conj(g, X, group):
    """Batched ``g X g^-1`` on raw arrays."""
    return g @ X @ group.inv(g)


# ----------------------------------------------------------------------------
# crossed modules


@dataclass(frozen=True)
class CrossedModule:
    """Groups G, H with tau: H -> G and an action alpha of G on H.

    ``tau``/``alpha`` act on group arrays, ``tau_alg``/``alpha_alg`` are their
    derivatives in the H slot. ``section`` is a right inverse of ``tau`` on its
    image, used to manufacture quasi-flat plaquettes.
    """

    name: str
    G: MatrixGroup
    H: MatrixGroup
    tau: Callable
    tau_alg: Callable
    alpha: Callable
    alpha_alg: Callable
    tau_is_identity: bool = False
    section: Optional[Callable] = None
    tau_alg_inverse: Optional[Callable] = None

    def __repr__(self):
        return f"CrossedModule({self.name!r})"


@dataclass(frozen=True)
class CrossedModuleReport:
    equivariance: float  # tau(alpha(g)h) vs g tau(h) g^-1
    peiffer: float  # alpha(tau(h))h' vs h h' h^-1
    n_samples: int

    @property
    def max_residual(self):
        return max(self.equivariance, self.peiffer)


def crossed_module_check(cm, n_samples=1000, seed=0, scale=1.0):
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    g = cm.G.random(rng, scale, n_samples)
    h = cm.H.random(rng, scale, n_samples)
    h2 = cm.H.random(rng, scale, n_samples)
    lhs1 = cm.tau(cm.alpha(g, h))
    rhs1 = g @ cm.tau(h) @ cm.G.inv(g)
    lhs2 = cm.alpha(cm.tau(h), h2)
    rhs2 = h @ h2 @ cm.H.inv(h)
    return CrossedModuleReport(
        equivariance=float(np.max(frob(lhs1 - rhs1))),
        peiffer=float(np.max(frob(lhs2 - rhs2))),
        n_samples=n_samples,
    )


def _identity_map(x):
    return np.asarray(x, dtype=complex)


def _conjugation_module(name, group):
    def alpha(g, h):
        return g @ h @ group.inv(g)

    return CrossedModule(
        name=name, G=group, H=group, tau=_identity_map, tau_alg=_identity_map,
        alpha=alpha, alpha_alg=alpha, tau_is_identity=True, section=_identity_map,
        tau_alg_inverse=_identity_map,
    )


def _trivial_module(name, G, H):
    """tau == e, alpha trivial; needs H abelian."""

    def tau(h):
        h = np.asarray(h)
        return G.identity(h.shape[:-2])

    def tau_alg(X):
        X = np.asarray(X)
        return G.zero(X.shape[:-2])

    def alpha(g, h):
        g, h = np.asarray(g), np.asarray(h, dtype=complex)
        shape = np.broadcast_shapes(g.shape[:-2], h.shape[:-2])
        return np.broadcast_to(h, shape + h.shape[-2:]).copy()

    return CrossedModule(name=name, G=G, H=H, tau=tau, tau_alg=tau_alg,
                         alpha=alpha, alpha_alg=alpha)


def _so3_on_r3():
    G, H = get_group("SO3"), get_group("R3")

    def embed(g):
        g = np.asarray(g, dtype=complex)
        out = H.identity(g.shape[:-2])
        out[..., :3, :3] = g
        return out

    def alpha(g, h):
        e = embed(g)
        return e @ np.asarray(h, dtype=complex) @ dagger(e)

    def alpha_alg(g, X):
        e = embed(g)
        return e @ np.asarray(X, dtype=complex) @ dagger(e)

    def tau(h):
        return G.identity(np.asarray(h).shape[:-2])

    def tau_alg(X):
        return G.zero(np.asarray(X).shape[:-2])

    return CrossedModule(name="so3-on-r3", G=G, H=H, tau=tau, tau_alg=tau_alg,
                         alpha=alpha, alpha_alg=alpha_alg)


def su2_to_so3(U):
    """Double cover SU(2) -> SO(3): R_ij = tr(s_i U s_j U^+) / 2."""
    U = np.asarray(U, dtype=complex)
    R = 0.5 * np.einsum("iab,...bc,jcd,...ad->...ij", PAULI, U, PAULI, np.conj(U))
    return R.real.astype(complex)


def su2_to_so3_alg(X):
    X = np.asarray(X, dtype=complex)
    comm = np.einsum("...ab,jbc->...jac", X, PAULI) - np.einsum("jab,...bc->...jac", PAULI, X)
    R = 0.5 * np.einsum("iab,...jba->...ij", PAULI, comm)
    return R.real.astype(complex)


def so3_to_su2_section(R):
    """The lift of R with non-negative trace."""
    R = np.asarray(R, dtype=complex)
    flat = R.real.reshape(-1, 3, 3)
    quat = Rotation.from_matrix(flat).as_quat(canonical=True)  # x, y, z, w
    w = quat[:, 3][:, None, None]
    U = w * np.eye(2) - 1j * np.einsum("nk,kab->nab", quat[:, :3], PAULI)
    return U.reshape(R.shape[:-2] + (2, 2))


def _linear_inverse(fn, source, target):
    """Inverse of a linear algebra map ``fn: source algebra -> target algebra``."""
    images = np.stack([target.coeffs(fn(b)) for b in source.basis], axis=1)
    inv = np.linalg.pinv(images)

    def inverse(Y):
        return source.from_coeffs(np.einsum("ij,...j->...i", inv, target.coeffs(Y)))

    return inverse


def _su2_so3():
    H, G = get_group("SU2"), get_group("SO3")

    def alpha(R, U):
        s = so3_to_su2_section(R)
        return s @ np.asarray(U, dtype=complex) @ dagger(s)

    return CrossedModule(
        name="su2-so3", G=G, H=H, tau=su2_to_so3, tau_alg=su2_to_so3_alg,
        alpha=alpha, alpha_alg=alpha, section=so3_to_su2_section,
        tau_alg_inverse=_linear_inverse(su2_to_so3_alg, H, G),
    )


CROSSED_MODULES = {
    "su2-conj": lambda: _conjugation_module("su2-conj", get_group("SU2")),
    "so3-conj": lambda: _conjugation_module("so3-conj", get_group("SO3")),
    "u1-abelian": lambda: _conjugation_module("u1-abelian", get_group("U1")),
    "so2-abelian": lambda: _conjugation_module("so2-abelian", get_group("SO2")),
    "su2xu1-conj": lambda: _conjugation_module("su2xu1-conj", get_group("SU2xU1")),
    "su2-so3": _su2_so3,
    "so3-on-r3": _so3_on_r3,
    "su2-u1-trivial": lambda: _trivial_module("su2-u1-trivial", get_group("SU2"), get_group("U1")),
}


def crossed_module(name) -> CrossedModule:
    try:
        return CROSSED_MODULES[name]()
    except KeyError:
        raise KeyError(f"unknown crossed module {name!r}; known: {sorted(CROSSED_MODULES)}") from None
