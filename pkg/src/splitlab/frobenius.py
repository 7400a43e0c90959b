"""Involutivity of the E bundle, measured through finite differences.

Local orthonormal frames for E are built by projecting a fixed pivot set of
coordinate directions onto E(x) and orthonormalizing in a deterministic order.
Lie brackets are computed with central differences plus one optional
Richardson level; the projection defect |Pi [Y_i, Y_j]| onto F along E is the
involutivity measurement. The module also checks the unconditional
d(d-1) expansion bound for arbitrary unit combinations, the pushforward
naturality of the bracket, the one-form identity
d(eta)(Z, W) = Z(eta(W)) - W(eta(Z)) - eta([Z, W]), and probes the dynamical
upper bound defect <= K * s^k_d s^k_{d-1} / m(Dphi^k|_F) along adapted frames
seeded with cocycle singular vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr as _pivoted_qr

from .cocycle import restricted_cocycle, singular_data
from .errors import ConfigError, FrameInstabilityError, OracleViolationError, StencilEscapeError
from .linalg import projector
from .models import ModelSystem, SplittingField
from .spaces import Space


def projection_onto_f(splitting: SplittingField, x) -> np.ndarray:
    """Idempotent operator with kernel E(x) and range F(x)."""
    e = splitting.e_basis(x)
    f = splitting.f_basis(x)
    n = e.shape[0]
    b = np.column_stack([e, f])
    target = np.zeros((n, n))
    target[:, e.shape[1]:] = f
    return target @ np.linalg.inv(b)


# ---------------------------------------------------------------------------
# Local frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalFrame:
    center: np.ndarray
    radius: float
    fields: tuple  # d callables, Point -> vector
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.fields)

    def matrix_at(self, y) -> np.ndarray:
        return np.column_stack([f(y) for f in self.fields])


def _gram_schmidt_fields(splitting: SplittingField, pivots: tuple, min_norm: float = 1e-8):
    """Pointwise Gram-Schmidt of the projected pivot directions, fixed order."""

    def frame_matrix(y):
        p = projector(splitting.e_basis(y))
        cols = []
        for piv in pivots:
            v = p[:, piv].copy()
            for c in cols:
                v -= (c @ v) * c
            nrm = np.linalg.norm(v)
            if nrm < min_norm:
                raise FrameInstabilityError(
                    f"projected coordinate frame dropped rank near {y} "
                    f"(pivot {piv}, norm {nrm:.2e}); try a smaller radius")
            cols.append(v / nrm)
        return np.column_stack(cols)

    return frame_matrix


def orthonormal_frame(splitting: SplittingField, x, radius: float = 0.1) -> LocalFrame:
    """Orthonormal local frame for E around x.

    Pivot coordinates are chosen once, at the center, by column-pivoted QR of
    the projector onto E(x); the same pivots are reused at every evaluation
    point, so the frame is C^1 wherever the pivot set keeps full rank.
    """
    x = np.asarray(x, dtype=float)
    d = splitting.dim_e
    p = projector(splitting.e_basis(x))
    _, _, piv = _pivoted_qr(p, pivoting=True)
    pivots = tuple(int(i) for i in piv[:d])
    frame_matrix = _gram_schmidt_fields(splitting, pivots)

    def make_field(i):
        return lambda y: frame_matrix(y)[:, i]

    return LocalFrame(x, float(radius), tuple(make_field(i) for i in range(d)), pivots)


def frame_with_initial_vectors(splitting: SplittingField, x, vectors,
                               radius: float = 0.1) -> LocalFrame:
    """Orthonormal frame rotated so the center values equal the given vectors.

    `vectors` must be orthonormal columns spanning E(x); the rotation is the
    constant orthogonal matrix sending the base frame's center values to them.
    """
    base = orthonormal_frame(splitting, x, radius)
    v = np.asarray(vectors, dtype=float)
    rot = base.matrix_at(base.center).T @ v
    frame_matrix = _gram_schmidt_fields(splitting, base.pivots)

    def make_field(i):
        return lambda y: frame_matrix(y) @ rot[:, i]

    return LocalFrame(base.center, float(radius), tuple(
        make_field(i) for i in range(v.shape[1])), base.pivots)


# ---------------------------------------------------------------------------
# Finite-difference brackets
# ---------------------------------------------------------------------------

def _check_stencil(space: Space | None, x: np.ndarray, h: float) -> None:
    if space is None or space.kind != "chart_box":
        return
    for j in range(len(x)):
        for sgn in (1.0, -1.0):
            y = x.copy()
            y[j] += sgn * h
            if not space.contains(y):
                raise StencilEscapeError(f"fd stencil leaves the chart at {y}")


def _field_jacobian(field, x: np.ndarray, h: float, space: Space | None) -> np.ndarray:
    """Central-difference Jacobian, columns d(field)/dx_j."""
    _check_stencil(space, x, h)
    n = len(x)
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((np.asarray(field(x + e)) - np.asarray(field(x - e))) / (2.0 * h))
    return np.column_stack(cols)


def _bracket_once(x_field, y_field, x: np.ndarray, h: float, space) -> np.ndarray:
    jx = _field_jacobian(x_field, x, h, space)
    jy = _field_jacobian(y_field, x, h, space)
    return jy @ np.asarray(x_field(x)) - jx @ np.asarray(y_field(x))


def lie_bracket_fd(x_field, y_field, x, h: float, richardson: bool = True,
                   space: Space | None = None) -> tuple[np.ndarray, float]:
    """[X, Y] at x by central differences; returns (vector, error estimate).

    With richardson=True the {h, h/2} levels are extrapolated (O(h^4)) and the
    error estimate is their gap / 3; otherwise the plain O(h^2) value at h is
    returned with the two-level gap as the estimate.
    """
    if not (1e-7 <= h <= 1e-2):
        raise ConfigError("fd step h must lie in [1e-7, 1e-2]")
    x = np.asarray(x, dtype=float)
    b1 = _bracket_once(x_field, y_field, x, h, space)
    b2 = _bracket_once(x_field, y_field, x, h / 2.0, space)
    if richardson:
        return (4.0 * b2 - b1) / 3.0, float(np.linalg.norm(b2 - b1)) / 3.0
    return b1, float(np.linalg.norm(b2 - b1))


def _all_pair_brackets(fields, x: np.ndarray, h: float, richardson: bool, space):
    """Brackets of all field pairs, sharing one Jacobian pass per level.

    Returns (brackets[i][j], errors (d,d), c1_norm) with brackets[j][i] =
    -brackets[i][j].
    """
    d = len(fields)
    vals = [np.asarray(f(x)) for f in fields]
    jac1 = [_field_jacobian(f, x, h, space) for f in fields]
    jac2 = [_field_jacobian(f, x, h / 2.0, space) for f in fields]
    c1 = max(float(np.linalg.norm(j)) for j in jac2)
    brackets = [[None] * d for _ in range(d)]
    errors = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            b1 = jac1[j] @ vals[i] - jac1[i] @ vals[j]
            b2 = jac2[j] @ vals[i] - jac2[i] @ vals[j]
            if richardson:
                vec = (4.0 * b2 - b1) / 3.0
                err = float(np.linalg.norm(b2 - b1)) / 3.0
            else:
                vec, err = b1, float(np.linalg.norm(b2 - b1))
            brackets[i][j] = vec
            brackets[j][i] = -vec
            errors[i, j] = errors[j, i] = err
    return brackets, errors, c1


@dataclass(frozen=True)
class BracketDiagnostics:
    center: np.ndarray
    pair_defects: np.ndarray    # (d, d) symmetric, |Pi [Y_i, Y_j]|, zero diagonal
    fd_errors: np.ndarray
    max_pair: tuple             # lexicographically smallest maximizing (i, j), i < j
    max_defect: float
    fd_step: float
    richardson_order: int
    c1_norm: float
    tolerance: float            # involutivity threshold, scaled by the C^1 norm
    involutive: bool


def _defect_matrix(frame: LocalFrame, proj: np.ndarray, x: np.ndarray, h: float,
                   richardson: bool, space) -> tuple[np.ndarray, np.ndarray, float]:
    brackets, errors, c1 = _all_pair_brackets(frame.fields, x, h, richardson, space)
    d = frame.dim
    defects = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            defects[i, j] = defects[j, i] = float(np.linalg.norm(proj @ brackets[i][j]))
    return defects, errors, c1


def bracket_defect(splitting: SplittingField, x, h: float = 1e-4,
                   tol: float = 1e-6, space: Space | None = None,
                   frame: LocalFrame | None = None,
                   richardson: bool = True) -> BracketDiagnostics:
    """All pairwise projection defects |Pi [Y_i, Y_j]|_x of an orthonormal frame."""
    x = np.asarray(x, dtype=float)
    if frame is None:
        frame = orthonormal_frame(splitting, x)
    proj = projection_onto_f(splitting, x)
    defects, errors, c1 = _defect_matrix(frame, proj, x, h, richardson, space)
    d = frame.dim
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    max_defect = max(defects[i, j] for i, j in pairs)
    max_pair = next((i, j) for i, j in pairs if defects[i, j] == max_defect)
    tol_eff = tol * max(1.0, c1) ** 2
    return BracketDiagnostics(
        center=x, pair_defects=defects, fd_errors=errors,
        max_pair=max_pair, max_defect=float(max_defect),
        fd_step=h, richardson_order=4 if richardson else 2,
        c1_norm=c1, tolerance=tol_eff, involutive=max_defect <= tol_eff,
    )


# ---------------------------------------------------------------------------
# Expansion bound for arbitrary combinations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CombinationBoundRecord:
    trials: int
    seed: int
    bound: float          # d(d-1) * max pair defect
    max_defect_seen: float
    max_ratio: float      # defect / (bound + fd tolerance), must stay <= 1


def combination_bound_check(splitting: SplittingField, x, trials: int = 100,
                            seed: int = 0, h: float = 1e-4,
                            space: Space | None = None) -> CombinationBoundRecord:
    """Random unit combinations never exceed d(d-1) times the max pair defect.

    Z = sum alpha_i Y_i and W = sum beta_i Y_i with C^1 coefficient profiles
    bounded by 1 at x. The bound is unconditional, so a violation (beyond fd
    tolerance) raises: it signals a projection or differencing bug.
    """
    x = np.asarray(x, dtype=float)
    frame = orthonormal_frame(splitting, x)
    proj = projection_onto_f(splitting, x)
    diag = bracket_defect(splitting, x, h=h, space=space, frame=frame)
    d = frame.dim
    bound = d * (d - 1) * diag.max_defect
    pair_tol = d * (d - 1) * float(diag.fd_errors.max())
    rng = np.random.default_rng(seed)
    max_seen = 0.0
    max_ratio = 0.0
    for trial in range(trials):
        coefs = rng.uniform(-1.0, 1.0, size=(2, d))
        grads = rng.standard_normal(size=(2, d, len(x)))

        def combo(row):
            def field(y, _row=row):
                alpha = coefs[_row] + grads[_row] @ (y - x)
                return frame.matrix_at(y) @ alpha
            return field

        z_field, w_field = combo(0), combo(1)
        vec, err = lie_bracket_fd(z_field, w_field, x, h, space=space)
        defect = float(np.linalg.norm(proj @ vec))
        allowance = bound + pair_tol + err + 1e-10
        max_seen = max(max_seen, defect)
        max_ratio = max(max_ratio, defect / allowance)
        if defect > allowance:
            raise OracleViolationError(
                f"combination bound violated: defect {defect:.3e} > "
                f"{bound:.3e} + fd tolerance",
                witness={"trial": trial, "coefs": coefs, "grads": grads})
    return CombinationBoundRecord(trials, seed, float(bound), max_seen, max_ratio)


# ---------------------------------------------------------------------------
# Naturality of the bracket under pushforward
# ---------------------------------------------------------------------------

def naturality_check(model: ModelSystem, x_field, y_field, x, k_small: int,
                     h: float = 1e-4, richardson: bool = False) -> float:
    """Residual of Dphi^k [X, Y]_x = [phi^k_* X, phi^k_* Y]_{phi^k(x)}.

    Everything is evaluated on the coordinate lift (raw map formulas), so
    non-periodic test fields are admissible. Plain central differences by
    default: the O(h^2) truncation is the quantity whose order callers measure.
    """
    if k_small not in (1, 2, 3):
        raise ConfigError("naturality_check supports k_small in {1, 2, 3}")
    x = np.asarray(model.space.canonicalize(x), dtype=float)
    space = model.space if model.space.kind == "chart_box" else None

    pts = [x]
    for _ in range(k_small):
        pts.append(np.asarray(model.map_fn(pts[-1]), dtype=float))
    jk = np.eye(model.dim)
    for p in pts[:-1]:
        jk = model.jacobian_fn(p) @ jk

    bracket_x, _ = lie_bracket_fd(x_field, y_field, x, h, richardson=richardson, space=space)
    lhs = jk @ bracket_x

    def pushforward(field):
        def pushed(y):
            w = np.asarray(y, dtype=float)
            for _ in range(k_small):
                w = np.asarray(model.inverse_fn(w), dtype=float)
            val = np.asarray(field(w))
            for _ in range(k_small):
                val = model.jacobian_fn(w) @ val
                w = np.asarray(model.map_fn(w), dtype=float)
            return val
        return pushed

    bracket_img, _ = lie_bracket_fd(pushforward(x_field), pushforward(y_field),
                                    pts[-1], h, richardson=richardson, space=space)
    return float(np.linalg.norm(lhs - bracket_img))


# ---------------------------------------------------------------------------
# One-form identity
# ---------------------------------------------------------------------------

def transverse_one_form(splitting: SplittingField, x, reference=None):
    """One-form annihilating E near x: eta(.) = <V(y), .> with V in E-perp.

    The reference vector fixing V is chosen from the F direction at the center
    unless supplied; it is returned alongside eta so runs can record it.
    """
    x = np.asarray(x, dtype=float)
    if reference is None:
        f0 = splitting.f_basis(x)[:, 0]
        reference = f0 - projector(splitting.e_basis(x)) @ f0
    reference = np.asarray(reference, dtype=float)
    nrm = np.linalg.norm(reference - projector(splitting.e_basis(x)) @ reference)
    if nrm < 1e-10:
        raise ConfigError("reference vector is tangent to E at the center")

    def eta(y):
        v = reference - projector(splitting.e_basis(y)) @ reference
        return v / np.linalg.norm(v)

    return eta, reference


def cartan_check(splitting: SplittingField, eta_field, z_field, w_field, x,
                 h: float = 1e-4, space: Space | None = None) -> float:
    """Residual of eta([Z,W]) = Z(eta(W)) - W(eta(Z)) - d(eta)(Z, W) at x.

    d(eta) is evaluated from central differences of eta's coefficients; the
    directional derivatives use the field values at x as directions.
    """
    x = np.asarray(x, dtype=float)
    bracket, _ = lie_bracket_fd(z_field, w_field, x, h, space=space)
    lhs = float(np.asarray(eta_field(x)) @ bracket)

    def pairing(first, second):
        def g(y):
            return float(np.asarray(eta_field(y)) @ np.asarray(second(y)))
        v = np.asarray(first(x), dtype=float)
        return (g(x + h * v) - g(x - h * v)) / (2.0 * h)

    z_eta_w = pairing(z_field, w_field)
    w_eta_z = pairing(w_field, z_field)
    grad_eta = _field_jacobian(eta_field, x, h, space)  # columns d(eta)/dx_j
    g = grad_eta.T
    zv = np.asarray(z_field(x), dtype=float)
    wv = np.asarray(w_field(x), dtype=float)
    d_eta = float(zv @ g @ wv - wv @ g @ zv)
    return abs(lhs - (z_eta_w - w_eta_z - d_eta))


# ---------------------------------------------------------------------------
# Dynamical upper-bound probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DynamicalBoundProbe:
    point: np.ndarray
    ks: tuple
    defects: np.ndarray        # D_k: max pair defect of the adapted frame
    log_ratios: np.ndarray     # ln(s^k_d s^k_{d-1} / m(Dphi^k|_F))
    constants: np.ndarray      # K_k = D_k / ratio, formed in log space
    max_pairs: tuple


def dynamical_bound_probe(model: ModelSystem, x, k_list, h: float = 1e-4) -> DynamicalBoundProbe:
    """Adapted-frame defects against the second-order singular-value ratio.

    For each k the frame is seeded with the forward singular vectors of the
    E-cocycle (ascending), the maximal pair defect D_k is measured at x, and
    the implied constant K_k = D_k / (s^k_d s^k_{d-1} / m(Dphi^k|_F)) recorded.
    """
    x = model.space.canonicalize(x)
    space = model.space if model.space.kind == "chart_box" else None
    ks = tuple(int(k) for k in k_list)
    if any(b <= a for a, b in zip(ks, ks[1:])) or any(k < 1 for k in ks):
        raise ConfigError("k_list must be strictly increasing positive integers")
    defects = np.empty(len(ks))
    log_ratios = np.empty(len(ks))
    pairs = []
    for idx, k in enumerate(ks):
        coc_e = restricted_cocycle(model, x, k, "E")
        coc_f = restricted_cocycle(model, x, k, "F")
        vecs = singular_data(coc_e).right_vectors
        frame = frame_with_initial_vectors(model.splitting, x, vecs)
        diag = bracket_defect(model.splitting, x, h=h, space=space, frame=frame)
        defects[idx] = diag.max_defect
        pairs.append(diag.max_pair)
        w_e = coc_e.values_log_desc
        log_ratios[idx] = w_e[0] + w_e[1] - coc_f.values_log_desc[-1]
    with np.errstate(over="ignore"):
        constants = np.exp(np.log(np.maximum(defects, 1e-300)) - log_ratios)
    return DynamicalBoundProbe(x, ks, defects, log_ratios, constants, tuple(pairs))
