import numpy as np
import pytest

from surfhol.errors import GridMismatch, VariationTooCoarse
from surfhol.fields import (
    constant_connection, constant_two_form, curvature, landau_connection, poly2_two_form,
    random_poly2_connection, wedge, zero_connection, zero_two_form,
)
from surfhol.liecore import crossed_module, frob
from surfhol.pathspace import (
    Arc, CubicBezier, LiftedTangentField, PathMap, SampledPath, Segment, SplinePath,
    TangentField, VectorFieldMap, chen_integral_2form, chen_product_2form, half_path_difference,
    holonomy_variation, horizontal_lift_path, lift_tangent_field, omega_curvature_direct,
    omega_curvature_eval, omega_eval, omega_horizontal_lift, omega_local_endpoint_form,
    omega_local_eval, path_holonomy, sigma_lift_tangent_field, stokes_residual,
    tangent_field_from_variation, theta_eval,
)
from surfhol.quadrature import loglog_slope

SU2 = crossed_module("su2-conj")
U1 = crossed_module("u1-abelian")
X_AXIS = Segment([0, 0], [1, 0])
UP = VectorFieldMap.constant([0.0, 1.0])


def su2_fields(seed, scale=0.3):
    rng = np.random.default_rng(seed)
    G = SU2.G
    Abar = random_poly2_connection(G, rng, scale)
    A = random_poly2_connection(G, rng, scale)
    coeffs = G.from_coeffs(scale * rng.standard_normal((6, G.dim)))
    B = poly2_two_form(G, coeffs[0], coeffs[1:3], coeffs[3:])
    return Abar, A, B


class Reparametrized(PathMap):
    def __init__(self, base, a):
        self.base, self.a = base, a

    def point(self, t):
        return self.base.point(t + self.a * t * (1 - t))

    def velocity(self, t):
        return (1 + self.a * (1 - 2 * t))[..., None] * self.base.velocity(t + self.a * t * (1 - t))


# ----------------------------------------------------------------------------
# sampled paths and families


def test_grid_validation():
    t = np.linspace(0, 1, 4)
    with pytest.raises(GridMismatch):
        SampledPath(t, np.zeros((4, 2)), np.zeros((4, 2)))
    t = np.array([0.0, 0.2, 0.5, 0.8, 1.0])
    with pytest.raises(GridMismatch):
        SampledPath(t, np.zeros((5, 2)), np.zeros((5, 2)))


@pytest.mark.parametrize("path", [
    Segment([0, 0], [1, 0.5]), Arc([0, 0], 1.0, 0.0, 1.5), CubicBezier([[0, 0], [0.3, 0.5], [0.7, -0.2], [1, 0.3]]),
    SplinePath(np.linspace(0, 1, 9), np.stack([np.linspace(0, 1, 9), np.sin(np.linspace(0, 3, 9))], -1)),
])
def test_path_velocities_match_finite_differences(path):
    t = np.linspace(0.1, 0.9, 9)
    h = 1e-6
    fd = (path.point(t + h) - path.point(t - h)) / (2 * h)
    assert np.max(np.abs(path.velocity(t) - fd)) < 1e-7


def test_point_list_path():
    gamma = SampledPath.from_points(np.linspace(0, 1, 11), np.stack([np.linspace(0, 1, 11)] * 2, -1))
    assert np.allclose(gamma.velocity, 1.0)


# ----------------------------------------------------------------------------
# holonomy and lifts


def test_zero_connection_gives_identity_frames():
    lift = path_holonomy(zero_connection(SU2.G), Arc([0, 0], 1, 0, 2).sample(20))
    assert np.max(frob(lift.frame - np.eye(2))) == 0


def test_u1_constant_holonomy():
    b = 0.8
    Abar = constant_connection(U1.G, [[[1j * b]], [[0.0]]])
    lift = path_holonomy(Abar, X_AXIS.sample(200))
    assert abs(lift.frame[-1, 0, 0] - np.exp(-1j * b)) < 1e-14


def test_su2_constant_holonomy_closed_form():
    G = SU2.G
    C = G.random_algebra(np.random.default_rng(0), 1.0, 2)
    lift = path_holonomy(constant_connection(G, C), X_AXIS.sample(200))
    assert frob(lift.frame[-1] - G.exp(-C[0])) < 1e-8


def test_seeded_lift_is_right_translate():
    Abar, _, _ = su2_fields(1)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(100)
    g = SU2.G.random(np.random.default_rng(2))
    assert np.max(frob(horizontal_lift_path(Abar, gamma, np.eye(2)).frame - path_holonomy(Abar, gamma).frame)) == 0
    assert np.max(frob(horizontal_lift_path(Abar, gamma, g).frame - path_holonomy(Abar, gamma).frame @ g)) == 0


def test_lift_concatenation():
    Abar, _, _ = su2_fields(3)
    path = CubicBezier([[0, 0], [0.3, 0.5], [0.7, -0.2], [1, 0.3]])
    full = path_holonomy(Abar, path.sample(200)).frame[-1]
    first = path_holonomy(Abar, path.restrict(0, 0.5).sample(100)).frame[-1]
    second = horizontal_lift_path(Abar, path.restrict(0.5, 1).sample(100), first).frame[-1]
    assert frob(full - second) < 1e-9


def test_reversed_path_gives_inverse_holonomy():
    Abar, _, _ = su2_fields(4)
    path = Arc([0.2, 0], 0.8, 0.3, 2.0)
    fwd = path_holonomy(Abar, path.sample(200)).frame[-1]
    back = path_holonomy(Abar, path.reversed().sample(200)).frame[-1]
    assert frob(back - SU2.G.inv(fwd)) < 1e-9


def test_holonomy_is_reparametrization_invariant():
    Abar, _, _ = su2_fields(5, 0.2)
    path = CubicBezier([[0, 0], [0.3, 0.5], [0.7, -0.2], [1, 0.3]])
    n = 8000
    plain = path_holonomy(Abar, path.sample(n)).frame[-1]
    moved = path_holonomy(Abar, Reparametrized(path, 0.4).sample(n)).frame[-1]
    assert frob(plain - moved) < 1e-8


def test_holonomy_converges_at_second_order():
    Abar, _, _ = su2_fields(6)
    path = Arc([0, 0], 1, 0, 2)
    ref = path_holonomy(Abar, path.sample(6400)).frame[-1]
    ns = [50, 100, 200, 400]
    res = [frob(path_holonomy(Abar, path.sample(n)).frame[-1] - ref) for n in ns]
    assert abs(loglog_slope(ns, res) - 2) < 0.2


def test_lift_tangent_field_examples():
    G = SU2.G
    Abar, _, _ = su2_fields(7)
    gamma = X_AXIS.sample(100)
    lift = path_holonomy(Abar, gamma)
    zero = lift_tangent_field(Abar, lift, TangentField(gamma, np.zeros((101, 2))), np.zeros((2, 2)))
    assert np.max(frob(zero.vertical_part)) == 0

    flat = constant_connection(G, np.zeros((2, 2, 2)))
    w0 = G.random_algebra(np.random.default_rng(8))
    vt = lift_tangent_field(flat, path_holonomy(flat, gamma), UP.sample(gamma), w0)
    assert np.max(frob(vt.vertical_part - w0)) == 0


def test_lift_tangent_field_landau():
    b = 0.7
    Abar = landau_connection(U1.G, b)
    gamma = X_AXIS.sample(200)
    vt = lift_tangent_field(Abar, path_holonomy(Abar, gamma), UP.sample(gamma), np.zeros((1, 1)))
    assert np.max(np.abs(vt.vertical_part[:, 0, 0] - 1j * b * gamma.t)) < 1e-8


def test_stokes_examples():
    flat = zero_connection(SU2.G)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(100)
    vt = tangent_field_from_variation(flat, gamma, VectorFieldMap.linear([0, 0.3], [0.2, 0.1]).sample(gamma))
    assert stokes_residual(flat, vt.along, vt) < 1e-10

    Abar = landau_connection(U1.G, 0.7)
    gamma = X_AXIS.sample(200)
    vt = tangent_field_from_variation(Abar, gamma, UP.sample(gamma))
    assert stokes_residual(Abar, vt.along, vt, 1.0) < 1e-8


def test_stokes_at_interior_nodes_and_off_grid():
    Abar, _, _ = su2_fields(9, 0.2)
    gamma = Segment([0, 0], [1, 0.5]).sample(400)
    vt = tangent_field_from_variation(Abar, gamma, VectorFieldMap.sine([0.3, 0.2]).sample(gamma))
    assert max(stokes_residual(Abar, vt.along, vt, T) for T in (0.25, 0.5, 0.75)) < 1e-6
    with pytest.raises(GridMismatch):
        stokes_residual(Abar, vt.along, vt, 0.3333)


def test_stokes_converges_at_second_order():
    Abar, _, _ = su2_fields(10, 0.2)
    path, field = Arc([0, 0], 1, 0, 1.5), VectorFieldMap.linear([0, 0.3], [0.2, 0.1])
    ns = [50, 100, 200, 400]
    res = []
    for n in ns:
        gamma = path.sample(n)
        vt = tangent_field_from_variation(Abar, gamma, field.sample(gamma))
        res.append(stokes_residual(Abar, vt.along, vt))
    assert abs(loglog_slope(ns, res) - 2) < 0.2


# ----------------------------------------------------------------------------
# Chen integrals, theta, omega


def test_chen_integral_examples():
    gamma = X_AXIS.sample(20)
    Abar = zero_connection(U1.G)
    lift = path_holonomy(Abar, gamma)
    vt = sigma_lift_tangent_field(Abar, lift, UP.sample(gamma))
    assert frob(chen_integral_2form(zero_two_form(U1.H), U1, lift, vt)) == 0
    b = 0.9
    Z = chen_integral_2form(constant_two_form(U1.H, [[1j * b]]), U1, lift, vt)
    assert abs(Z[0, 0] - 1j * b) < 1e-15
    assert abs(theta_eval(constant_two_form(U1.H, [[1j * b]]), U1, Abar, gamma, UP.sample(gamma))[0, 0] - 1j * b) < 1e-15


def test_chen_integral_ignores_vertical_part():
    Abar, _, B = su2_fields(11)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(50)
    lift = path_holonomy(Abar, gamma)
    vt = sigma_lift_tangent_field(Abar, lift, UP.sample(gamma))
    bumped = LiftedTangentField(lift, vt.horizontal_part,
                                vt.vertical_part + SU2.G.random_algebra(np.random.default_rng(0), 1.0, 51))
    assert frob(chen_integral_2form(B, SU2, lift, vt) - chen_integral_2form(B, SU2, lift, bumped)) == 0


def test_theta_equivariance():
    Abar, _, B = su2_fields(12)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(100)
    v = VectorFieldMap.sine([0.3, 0.2]).sample(gamma)
    g = SU2.G.random(np.random.default_rng(1))
    base = theta_eval(B, SU2, Abar, gamma, v)
    moved = theta_eval(B, SU2, Abar, gamma, v, seed=g)
    assert frob(moved - SU2.alpha(SU2.G.inv(g), base)) < 1e-10
    assert frob(theta_eval(zero_two_form(SU2.H), SU2, Abar, gamma, v)) == 0


def test_omega_zero_data():
    G = SU2.G
    Z = zero_connection(G)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(40)
    lift = path_holonomy(Z, gamma)
    vt = lift_tangent_field(Z, lift, UP.sample(gamma), np.zeros((2, 2)))
    assert frob(omega_eval(Z, Z, zero_two_form(G), SU2, lift, vt)) == 0
    assert frob(omega_local_eval(Z, Z, zero_two_form(G), SU2, gamma, UP.sample(gamma))) == 0


@pytest.mark.parametrize("name", ["su2-conj", "su2-so3", "so3-on-r3", "u1-abelian", "su2xu1-conj"])
def test_omega_connection_axioms(name):
    cm = crossed_module(name)
    rng = np.random.default_rng(13)
    G = cm.G
    Abar = random_poly2_connection(G, rng, 0.3)
    A = random_poly2_connection(G, rng, 0.3)
    coeffs = cm.H.from_coeffs(0.3 * rng.standard_normal((3, cm.H.dim)))
    B = poly2_two_form(cm.H, coeffs[0], coeffs[1:3])
    gamma = Arc([0, 0], 1, 0, 1.5).sample(100)
    lift = path_holonomy(Abar, gamma)
    X = G.random_algebra(rng)
    vertical = lift_tangent_field(Abar, lift, TangentField(gamma, np.zeros((101, 2))), X)
    assert frob(omega_eval(A, Abar, B, cm, lift, vertical) - X) < 1e-14

    v = sigma_lift_tangent_field(Abar, lift, VectorFieldMap.sine([0.3, 0.2]).sample(gamma))
    base = omega_eval(A, Abar, B, cm, lift, v)
    for g in G.random(rng, 1.0, 5):
        moved = omega_eval(A, Abar, B, cm, lift.translated(g), v.translated(g))
        assert frob(moved - G.inv(g) @ base @ g) < 1e-10


def test_omega_local_matches_generic_evaluation():
    Abar, A, B = su2_fields(14)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(200)
    v = VectorFieldMap.linear([0, 0.3], [0.2, 0.1]).sample(gamma)
    lift = path_holonomy(Abar, gamma)
    generic = omega_eval(A, Abar, B, SU2, lift, sigma_lift_tangent_field(Abar, lift, v))
    assert frob(omega_local_eval(A, Abar, B, SU2, gamma, v) - generic) < 1e-9


def test_omega_local_against_lifted_variation():
    Abar, A, B = su2_fields(15, 0.2)
    gamma = Segment([0, 0], [1, 0.5]).sample(200)
    v = VectorFieldMap.linear([0, 0.3], [0.2, 0.1]).sample(gamma)
    vt = tangent_field_from_variation(Abar, gamma, v)
    local = omega_local_eval(A, Abar, B, SU2, gamma, v)
    assert frob(local - omega_eval(A, Abar, B, SU2, vt.along, vt)) < 1e-6
    endpoint = omega_local_endpoint_form(A, Abar, B, SU2, gamma, v)
    assert frob(endpoint + holonomy_variation(Abar, gamma, v) - local) < 1e-6
    assert frob(endpoint - local) > 1e-3


def test_omega_local_abelian_closed_form():
    b = 0.6
    Z = zero_connection(U1.G)
    gamma = X_AXIS.sample(20)
    val = omega_local_eval(Z, Z, constant_two_form(U1.H, [[1j * b]]), U1, gamma, UP.sample(gamma))
    assert abs(val[0, 0] - 1j * b) < 1e-15


def test_omega_horizontal_lift_examples():
    G = SU2.G
    Z = zero_connection(G)
    gamma = X_AXIS.sample(20)
    lift = path_holonomy(Z, gamma)
    zero = omega_horizontal_lift(Z, Z, zero_two_form(G), SU2, lift, TangentField(gamma, np.zeros((21, 2))))
    assert np.max(frob(zero.vertical_part)) == 0

    b = 0.6
    Zu = zero_connection(U1.G)
    v = VectorFieldMap.linear([0, 0], [0, 1]).sample(gamma)
    hl = omega_horizontal_lift(Zu, Zu, constant_two_form(U1.H, [[1j * b]]), U1, path_holonomy(Zu, gamma), v)
    assert np.max(np.abs(hl.vertical_part[:, 0, 0] + 0.5j * b)) < 1e-15


def test_omega_horizontal_lift_is_horizontal():
    Abar, A, B = su2_fields(16)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(200)
    lift = path_holonomy(Abar, gamma)
    v = VectorFieldMap.sine([0.3, 0.2]).sample(gamma)
    hl = omega_horizontal_lift(A, Abar, B, SU2, lift, v)
    assert frob(omega_eval(A, Abar, B, SU2, lift, hl)) < 1e-8
    forward = lift_tangent_field(Abar, lift, v, hl.vertical_part[0])
    assert np.max(frob(forward.vertical_part - hl.vertical_part)) < 1e-8


def test_chen_product_examples():
    gamma = X_AXIS.sample(40)
    Zu = zero_connection(U1.G)
    lift = path_holonomy(Zu, gamma)
    X = sigma_lift_tangent_field(Zu, lift, UP.sample(gamma))
    Bu = constant_two_form(U1.H, [[0.4j]])
    assert frob(chen_product_2form(Bu, Bu, U1, lift, X, X)) == 0

    Abar, _, B = su2_fields(17)
    lift = path_holonomy(Abar, gamma)
    X = sigma_lift_tangent_field(Abar, lift, VectorFieldMap.sine([0.3, 0.2]).sample(gamma))
    assert frob(chen_product_2form(B, B, SU2, lift, X, X)) < 1e-15


def test_chen_product_separable():
    G = SU2.G
    rng = np.random.default_rng(18)
    P, Q = G.random_algebra(rng), G.random_algebra(rng)
    B1 = constant_two_form(G, P)
    B2 = poly2_two_form(G, linear=np.stack([Q, np.zeros((2, 2))]))  # x1 Q
    Z = zero_connection(G)
    gamma = X_AXIS.sample(40)
    lift = path_holonomy(Z, gamma)
    X = sigma_lift_tangent_field(Z, lift, UP.sample(gamma))
    Y = sigma_lift_tangent_field(Z, lift, VectorFieldMap.linear([0, 0], [0, 2]).sample(gamma))
    # int B1(gamma', X) = P, int B2(gamma', Y) = Q int 2 t^2 = 2Q/3
    expected = (P @ Q - Q @ P) * 2 / 3
    assert frob(chen_product_2form(B1, B2, SU2, lift, X, Y) - expected) < 1e-9


# ----------------------------------------------------------------------------
# curvature of omega


def test_curvature_zero_fields():
    Z = zero_connection(SU2.G)
    gamma = Arc([0, 0], 1, 0, 1.5).sample(40)
    X, Y = UP.sample(gamma), VectorFieldMap.sine([0.3, 0.2]).sample(gamma)
    terms = omega_curvature_eval(Z, Z, zero_two_form(SU2.G), SU2, gamma, X, Y)
    assert frob(terms.total) == 0
    assert terms.method == "FD-d"


def test_curvature_without_B_is_endpoint_curvature():
    Abar, A, _ = su2_fields(19)
    path, B = Arc([0, 0], 1, 0, 1.5), zero_two_form(SU2.G)
    fX, fY = UP, VectorFieldMap.sine([0.3, 0.2], 0.5)

    def oracle(gamma):
        g1 = path_holonomy(Abar, gamma).frame[-1]
        F = curvature(A, gamma.points[-1]) * wedge(fX.value(1.0), fY.value(1.0))
        return SU2.G.inv(g1) @ F @ g1

    gamma = path.sample(200)
    terms = omega_curvature_eval(A, Abar, B, SU2, gamma, fX.sample(gamma), fY.sample(gamma))
    assert frob(terms.total - oracle(gamma)) < 1e-6
    # the finite-difference route carries the O(h^2) error of the discrete lifts
    gamma = path.sample(800)
    direct = omega_curvature_direct(A, Abar, B, SU2, gamma, fX.sample(gamma), fY.sample(gamma))
    assert frob(direct - oracle(gamma)) < 1e-6


def test_curvature_terms_match_direct_route():
    Abar, A, B = su2_fields(20, 0.2)
    gamma = Segment([0, 0], [1, 0.5]).sample(200)
    X, Y = VectorFieldMap.linear([0, 0.3], [0.2, 0.1]).sample(gamma), VectorFieldMap.sine([0.3, 0.2]).sample(gamma)
    terms = omega_curvature_eval(A, Abar, B, SU2, gamma, X, Y)
    direct = omega_curvature_direct(A, Abar, B, SU2, gamma, X, Y)
    assert frob(terms.total - direct) < 1e-4
    assert frob(direct) > 1e-3


def _loop_integral(A, Abar, B, cm, gamma, X, Y, eps):
    """Integral of the abelian omega around the square ``[0, eps]^2`` in (s1, s2)."""
    nodes, weights = np.polynomial.legendre.leggauss(6)
    u = 0.5 * eps * (nodes + 1)
    wts = 0.5 * eps * weights

    def omega(s1, s2, direction):
        g = gamma.displaced((s1, X), (s2, Y))
        return omega_local_eval(A, Abar, B, cm, g, TangentField(g, direction.vectors, direction.derivative_or_fd()))

    total = 0
    for ui, wi in zip(u, wts):
        total = total + wi * (omega(ui, 0.0, X) + omega(eps, ui, Y) - omega(ui, eps, X) - omega(0.0, ui, Y))
    return total


def test_abelian_curvature_matches_holonomy_defect():
    rng = np.random.default_rng(21)
    G = U1.G
    Abar, A = random_poly2_connection(G, rng, 0.4), random_poly2_connection(G, rng, 0.4)
    coeffs = G.from_coeffs(0.4 * rng.standard_normal((6, 1)))
    B = poly2_two_form(G, coeffs[0], coeffs[1:3], coeffs[3:])
    gamma = Arc([0, 0], 1, 0, 1.5).sample(200)
    X, Y = UP.sample(gamma), VectorFieldMap.sine([0.3, 0.2]).sample(gamma)
    terms = omega_curvature_eval(A, Abar, B, U1, gamma, X, Y)
    assert frob(terms.mixed) < 1e-15 and frob(terms.product) < 1e-15
    for eps in (0.04, 0.02):
        defect = _loop_integral(A, Abar, B, U1, gamma, X, Y, eps) / eps**2
        assert frob(defect - terms.total) < 1e-6


def test_curvature_rejects_tiny_step():
    Z = zero_connection(U1.G)
    gamma = X_AXIS.sample(20)
    with pytest.raises(VariationTooCoarse):
        omega_curvature_eval(Z, Z, zero_two_form(U1.G), U1, gamma, UP.sample(gamma), UP.sample(gamma), step=1e-12)


# ----------------------------------------------------------------------------
# half-path demonstration


def test_half_path_difference_is_visible():
    Abar, A, B = su2_fields(22)
    gap = half_path_difference(A, Abar, B, SU2, Arc([0, 0], 1, 0, 1.5), VectorFieldMap.sine([0.3, 0.2]), 200)
    assert gap > 1e-3
    with pytest.raises(GridMismatch):
        half_path_difference(A, Abar, B, SU2, X_AXIS, UP, 202)
