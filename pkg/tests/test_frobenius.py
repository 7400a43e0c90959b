import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitlab.errors import ConfigError, FrameInstabilityError, StencilEscapeError
from splitlab.frobenius import (bracket_defect, cartan_check,
                                combination_bound_check, dynamical_bound_probe,
                                frame_with_initial_vectors, lie_bracket_fd,
                                naturality_check, orthonormal_frame,
                                projection_onto_f, transverse_one_form)
from splitlab.models import SplittingField

CONTACT_X = lambda y: np.array([1.0, 0.0, y[1]])   # noqa: E731
CONTACT_Y = lambda y: np.array([0.0, 1.0, 0.0])    # noqa: E731


def constant_splitting(e_cols, f_cols):
    e = np.asarray(e_cols, dtype=float)
    f = np.asarray(f_cols, dtype=float)
    return SplittingField(e.shape[1], f.shape[1], lambda x: e, lambda x: f)


# ---------------------------------------------------------------- projection

def test_projection_orthogonal_splitting():
    s = constant_splitting(np.eye(3)[:, :2], np.eye(3)[:, 2:])
    p = projection_onto_f(s, np.zeros(3))
    assert np.allclose(p, np.diag([0.0, 0.0, 1.0]), atol=1e-14)


def test_projection_contact_at_origin(contact):
    p = projection_onto_f(contact.splitting, np.zeros(3))
    assert np.allclose(p @ np.array([1.0, 0.0, 0.0]), 0.0, atol=1e-14)
    assert np.allclose(p @ np.array([0.0, 1.0, 0.0]), 0.0, atol=1e-14)
    assert np.allclose(p @ np.array([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0], atol=1e-14)


def test_projection_oblique_two_dim():
    s = constant_splitting([[1.0], [0.0]], [[1.0], [1.0]])
    p = projection_onto_f(s, np.zeros(2))
    assert np.allclose(p @ np.array([0.0, 1.0]), [1.0, 1.0], atol=1e-13)
    assert np.allclose(p @ np.array([1.0, 0.0]), 0.0, atol=1e-13)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_projection_idempotent_kernel_range(seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(4, 4))
    while abs(np.linalg.det(b)) < 1e-2:
        b = rng.normal(size=(4, 4))
    s = constant_splitting(b[:, :2], b[:, 2:])
    p = projection_onto_f(s, np.zeros(4))
    assert np.linalg.norm(p @ p - p) <= 1e-10
    assert np.linalg.norm(p @ b[:, :2]) <= 1e-10
    assert np.allclose(p @ b[:, 2:], b[:, 2:], atol=1e-10)


# ---------------------------------------------------------------- frames

def test_frame_constant_plane_field_is_coordinate_frame():
    s = constant_splitting(np.eye(3)[:, :2], np.eye(3)[:, 2:])
    frame = orthonormal_frame(s, np.zeros(3))
    for y in (np.zeros(3), np.array([0.3, -0.2, 0.9])):
        assert np.allclose(np.abs(frame.matrix_at(y)), np.eye(3)[:, :2], atol=1e-14)


def test_frame_contact(contact):
    frame = orthonormal_frame(contact.splitting, np.zeros(3))
    m0 = frame.matrix_at(np.zeros(3))
    assert np.allclose(np.abs(m0), np.eye(3)[:, :2], atol=1e-12)
    y = np.array([0.1, 0.5, 0.0])
    m = frame.matrix_at(y)
    # orthonormal and spanning span{(1,0,y2),(0,1,0)}
    assert np.allclose(m.T @ m, np.eye(2), atol=1e-12)
    e = contact.splitting.e_basis(y)
    proj = e @ np.linalg.lstsq(e, m, rcond=None)[0]
    assert np.allclose(proj, m, atol=1e-10)


def test_frame_with_initial_vectors(cat3, base_point):
    base = orthonormal_frame(cat3.splitting, base_point)
    m = base.matrix_at(base_point)
    rot = np.array([[np.cos(0.7), -np.sin(0.7)], [np.sin(0.7), np.cos(0.7)]])
    target = m @ rot
    frame = frame_with_initial_vectors(cat3.splitting, base_point, target)
    assert np.allclose(frame.matrix_at(base_point), target, atol=1e-12)


def test_frame_instability_error():
    def e_basis(y):
        theta = 0.5 * np.pi * (1.0 + y[0])
        return np.array([[np.cos(theta)], [np.sin(theta)]])

    s = SplittingField(1, 1, e_basis, lambda y: np.array([[0.0], [1.0]]))
    frame = orthonormal_frame(s, np.zeros(2))
    with pytest.raises(FrameInstabilityError):
        frame.matrix_at(np.array([1.0, 0.0]))  # E turns orthogonal to the pivot


# ---------------------------------------------------------------- brackets

def test_lie_bracket_contact_fields():
    vec, err = lie_bracket_fd(CONTACT_X, CONTACT_Y, np.zeros(3), 1e-4)
    assert np.allclose(vec, [0.0, 0.0, -1.0], atol=1e-9)
    assert err <= 1e-9


def test_lie_bracket_constant_fields():
    c1 = lambda y: np.array([1.0, 2.0, 3.0])  # noqa: E731
    c2 = lambda y: np.array([-1.0, 0.5, 0.0])  # noqa: E731
    vec, _ = lie_bracket_fd(c1, c2, np.zeros(3), 1e-3)
    assert np.allclose(vec, 0.0, atol=1e-10)


def test_lie_bracket_stencil_escape(contact):
    x_edge = np.array([0.99995, 0.0, 0.0])
    with pytest.raises(StencilEscapeError):
        lie_bracket_fd(CONTACT_X, CONTACT_Y, x_edge, 1e-3, space=contact.space)
    with pytest.raises(ConfigError):
        lie_bracket_fd(CONTACT_X, CONTACT_Y, np.zeros(3), 1e-1)


def test_bracket_defect_cat3_plane(cat3):
    for x in cat3.space.random_points(5, seed=31):
        diag = bracket_defect(cat3.splitting, x)
        assert diag.max_defect <= 1e-9
        assert diag.involutive


def test_bracket_defect_contact_origin_and_general(contact):
    diag0 = bracket_defect(contact.splitting, np.zeros(3), space=contact.space)
    assert diag0.max_defect == pytest.approx(1.0, abs=1e-6)
    assert not diag0.involutive
    assert diag0.max_pair == (0, 1)
    for y1 in (0.3, -0.6):
        x = np.array([0.1, y1, 0.2])
        diag = bracket_defect(contact.splitting, x, space=contact.space)
        assert diag.max_defect == pytest.approx((1 + y1**2) ** -0.5, abs=1e-6)


def test_defect_matrix_symmetry_and_diagonal(contact):
    diag = bracket_defect(contact.splitting, np.zeros(3), space=contact.space)
    assert np.allclose(diag.pair_defects, diag.pair_defects.T)
    assert np.allclose(np.diag(diag.pair_defects), 0.0)


def test_combination_bound_contact(contact):
    rec = combination_bound_check(contact.splitting, np.zeros(3), trials=100,
                                  seed=12, space=contact.space)
    assert rec.max_ratio <= 1.0
    assert rec.bound == pytest.approx(2.0, abs=1e-5)


def test_combination_bound_constant_plane_both_sides_zero():
    s = constant_splitting(np.eye(3)[:, :2], np.eye(3)[:, 2:])
    rec = combination_bound_check(s, np.zeros(3), trials=20, seed=1)
    assert rec.bound <= 1e-12
    assert rec.max_defect_seen <= 1e-10


def test_combination_single_pair_equals_defect(contact):
    frame = orthonormal_frame(contact.splitting, np.zeros(3))
    proj = projection_onto_f(contact.splitting, np.zeros(3))
    vec, _ = lie_bracket_fd(frame.fields[0], frame.fields[1], np.zeros(3), 1e-4,
                            space=contact.space)
    diag = bracket_defect(contact.splitting, np.zeros(3), space=contact.space)
    assert np.linalg.norm(proj @ vec) == pytest.approx(diag.max_defect, rel=1e-10)
    assert np.linalg.norm(proj @ vec) <= 2 * diag.max_defect + 1e-9


# ---------------------------------------------------------------- naturality

def test_naturality_linear_fields_exact(cat3, base_point):
    lin1 = lambda y: np.array([y[1], y[2], y[0]])          # noqa: E731
    lin2 = lambda y: np.array([1.0, -1.0, 0.5])            # noqa: E731
    res = naturality_check(cat3, lin1, lin2, base_point, 2)
    assert res <= 1e-8


def test_naturality_identity_map_exact(identity3, base_point):
    poly = lambda y: np.array([y[1] ** 3, y[0] * y[2], y[0] ** 2])  # noqa: E731
    lin = lambda y: np.array([y[2], y[0], y[1]])                    # noqa: E731
    assert naturality_check(identity3, poly, lin, base_point, 1) == 0.0


def _poly_fields():
    x_field = lambda y: np.array([y[1] ** 3, np.sin(2 * np.pi * y[2]) / (2 * np.pi),
                                  y[0] * y[1]])            # noqa: E731
    y_field = lambda y: np.array([y[2] ** 2, y[0] ** 3,
                                  np.cos(2 * np.pi * y[0]) / (2 * np.pi)])  # noqa: E731
    return x_field, y_field


def test_naturality_polynomial_fields_residual_and_order(cat3, base_point):
    xf, yf = _poly_fields()
    res = {h: naturality_check(cat3, xf, yf, base_point, 2, h=h)
           for h in (1e-3, 1e-4)}
    assert res[1e-4] <= 1e-5
    slope = np.log(res[1e-3] / res[1e-4]) / np.log(10.0)
    assert slope >= 1.8


def test_naturality_gate(cat3, base_point):
    xf, yf = _poly_fields()
    with pytest.raises(ConfigError):
        naturality_check(cat3, xf, yf, base_point, 4)


# ---------------------------------------------------------------- one-form identity

def test_cartan_contact_closed_form(contact):
    eta = lambda y: np.array([-y[1], 0.0, 1.0])  # annihilates the contact planes
    res = cartan_check(contact.splitting, eta, CONTACT_X, CONTACT_Y, np.zeros(3),
                       space=contact.space)
    assert res <= 1e-8
    # closed-form pieces: eta([Z,W]) = -1, derivative terms 0, d(eta)(Z,W) = 1
    vec, _ = lie_bracket_fd(CONTACT_X, CONTACT_Y, np.zeros(3), 1e-4,
                            space=contact.space)
    assert eta(np.zeros(3)) @ vec == pytest.approx(-1.0, abs=1e-9)


def test_cartan_constant_everything_zero():
    s = constant_splitting(np.eye(3)[:, :2], np.eye(3)[:, 2:])
    eta = lambda y: np.array([0.0, 0.0, 1.0])  # noqa: E731
    z = lambda y: np.array([1.0, 0.0, 0.0])    # noqa: E731
    w = lambda y: np.array([0.0, 1.0, 0.0])    # noqa: E731
    assert cartan_check(s, eta, z, w, np.zeros(3)) <= 1e-12


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_cartan_random_polynomial_data(seed):
    rng = np.random.default_rng(seed)
    ce = rng.uniform(-1, 1, size=(3, 3))   # linear one-form coefficients
    cz = rng.uniform(-1, 1, size=(3, 3, 3))

    eta = lambda y: ce @ y + np.array([0.3, -0.2, 1.0])         # noqa: E731
    z = lambda y: np.array([y @ cz[0] @ y, y @ cz[1] @ y, 1.0])  # noqa: E731
    w = lambda y: np.array([1.0, y @ cz[2] @ y, y[0] * y[1]])    # noqa: E731
    s = constant_splitting(np.eye(3)[:, :2], np.eye(3)[:, 2:])
    res = cartan_check(s, eta, z, w, np.array([0.1, -0.2, 0.05]))
    assert res <= 1e-6


def test_transverse_one_form_annihilates_e(contact):
    eta, ref = transverse_one_form(contact.splitting, np.zeros(3))
    for y in (np.zeros(3), np.array([0.2, 0.4, -0.1])):
        e = contact.splitting.e_basis(y)
        assert np.allclose(eta(y) @ e, 0.0, atol=1e-12)
    assert np.linalg.norm(ref) > 0


# ---------------------------------------------------------------- dynamical probe

def test_dynamical_probe_cat3(cat3, base_point):
    probe = dynamical_bound_probe(cat3, base_point, list(range(1, 9)))
    assert np.all(probe.defects <= 1e-8)
    assert np.all(np.isfinite(probe.constants))
    # log ratio decreases like -2k ln t
    assert probe.log_ratios[-1] < probe.log_ratios[0]


def test_dynamical_probe_identity(identity3, base_point):
    probe = dynamical_bound_probe(identity3, base_point, [1, 2, 3, 4])
    assert np.allclose(probe.log_ratios, probe.log_ratios[0], atol=1e-12)
    assert np.allclose(probe.defects, probe.defects[0], atol=1e-10)
    assert np.all(probe.constants <= 1e-8)  # defect 0 within fd noise


def test_dynamical_probe_gate(cat3, base_point):
    with pytest.raises(ConfigError):
        dynamical_bound_probe(cat3, base_point, [3, 2, 1])
