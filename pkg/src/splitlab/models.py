"""Diffeomorphism models with invariant tangent-bundle splittings.

A ModelSystem bundles a diffeomorphism of a flat torus or chart box (map,
inverse, Jacobian, all as raw coordinate formulas; canonicalization lives in
the orbit helpers) with a splitting field x -> (basis of E(x), basis of F(x)).
The zoo provides linear toral automorphisms, sheared (volume-preserving)
perturbations thereof, a fiber skew product, and a non-involutive contact
distribution on a chart box for pure integrability tests.

Splittings without closed forms are produced by a graph transform: the
expanding-side bundle is pushed forward along the orbit, the contracted-side
bundle pulled back, each from a seed splitting, with a fixed deterministic
iteration depth so that the resulting field is a pure function of the point.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import (
    ConfigError,
    ModelAssumptionError,
    OrbitEscapeError,
    RefinementError,
    SplittingDegeneracyError,
    UnknownModelError,
)
from .linalg import orth_columns, principal_angle_gap, projector
from .spaces import Space

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

MAX_ITERATE = 10**6
TWO_PI = 2.0 * np.pi

TRIBONACCI = np.array([[0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=float)


@dataclass(frozen=True)
class SplittingField:
    """Invariant splitting E + F given by basis fields.

    e_basis(x) has shape (n, dim_e), f_basis(x) shape (n, dim_f); columns span
    the subspaces. Fields expect canonical points and are pure functions.
    """

    dim_e: int
    dim_f: int
    e_basis: Callable[[np.ndarray], np.ndarray]
    f_basis: Callable[[np.ndarray], np.ndarray]
    invariance_tol: float = 1e-8

    def joint_basis(self, x: np.ndarray) -> np.ndarray:
        return np.column_stack([self.e_basis(x), self.f_basis(x)])

    def joint_condition(self, x: np.ndarray) -> float:
        return float(np.linalg.cond(self.joint_basis(x)))


@dataclass(frozen=True)
class ModelSystem:
    name: str
    space: Space
    map_fn: Callable[[np.ndarray], np.ndarray]
    inverse_fn: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Callable[[np.ndarray], np.ndarray]
    splitting: SplittingField
    smoothness_tag: str = "analytic"  # or "numeric_splitting"
    volume_preserving: bool = False
    params: dict = field(default_factory=dict)
    inverse_jacobian_fn: Callable[[np.ndarray], np.ndarray] | None = None
    seed_splitting: SplittingField | None = None

    @property
    def dim(self) -> int:
        return self.space.dimension

    def step(self, x: np.ndarray) -> np.ndarray:
        return self.space.canonicalize(self.map_fn(x))

    def step_back(self, x: np.ndarray) -> np.ndarray:
        return self.space.canonicalize(self.inverse_fn(x))

    def inverse_jacobian(self, x: np.ndarray) -> np.ndarray:
        """Jacobian of the inverse map at x (maps T_x -> T_{phi^{-1}(x)})."""
        if self.inverse_jacobian_fn is not None:
            return self.inverse_jacobian_fn(x)
        return np.linalg.inv(self.jacobian_fn(self.step_back(x)))


def iterate(model: ModelSystem, x, k: int, max_steps: int = MAX_ITERATE) -> np.ndarray:
    """phi^k(x), canonicalized each step; raises OrbitEscapeError on chart exit."""
    if abs(k) > max_steps:
        raise ConfigError(f"|k| = {abs(k)} exceeds the configured maximum {max_steps}")
    y = model.space.canonicalize(x)
    advance = model.step if k >= 0 else model.step_back
    for j in range(abs(k)):
        y = advance(y)
        if not model.space.contains(y):
            raise OrbitEscapeError(j + 1, y)
    return y


def orbit(model: ModelSystem, x, k: int) -> np.ndarray:
    """Points x, phi^{sign(k)}(x), ..., phi^k(x); shape (|k|+1, n)."""
    y = model.space.canonicalize(x)
    out = [y]
    advance = model.step if k >= 0 else model.step_back
    for j in range(abs(k)):
        y = advance(y)
        if not model.space.contains(y):
            raise OrbitEscapeError(j + 1, y)
        out.append(y)
    return np.array(out)


def invariance_residual(model: ModelSystem, x) -> tuple[float, float]:
    """Residuals of Dphi-invariance of (E, F) at x, measured at phi(x)."""
    x = model.space.canonicalize(x)
    y = model.step(x)
    j = model.jacobian_fn(x)
    s = model.splitting
    pe = projector(s.e_basis(y))
    pf = projector(s.f_basis(y))
    je = j @ orth_columns(s.e_basis(x))
    jf = j @ orth_columns(s.f_basis(x))
    re = np.linalg.norm(je - pe @ je) / max(np.linalg.norm(je), 1e-300)
    rf = np.linalg.norm(jf - pf @ jf) / max(np.linalg.norm(jf), 1e-300)
    return float(re), float(rf)


# ---------------------------------------------------------------------------
# Graph-transform refinement
# ---------------------------------------------------------------------------

def _pullback_basis(model: ModelSystem, x: np.ndarray, basis_field, depth: int) -> np.ndarray:
    """Seed basis at phi^depth(x) pulled back to x, orthonormalized stepwise."""
    pts = orbit(model, x, depth)
    b = basis_field(pts[depth])
    for j in range(depth - 1, -1, -1):
        b = np.linalg.solve(model.jacobian_fn(pts[j]), b)
        b = orth_columns(b)
    return b


def _pushforward_basis(model: ModelSystem, x: np.ndarray, basis_field, depth: int) -> np.ndarray:
    """Seed basis at phi^{-depth}(x) pushed forward to x, orthonormalized stepwise."""
    pts = orbit(model, x, -depth)
    b = basis_field(pts[depth])
    for j in range(depth, 0, -1):
        b = model.jacobian_fn(pts[j]) @ b
        b = orth_columns(b)
    return b


@dataclass(frozen=True)
class RefineResult:
    e_basis: np.ndarray
    f_basis: np.ndarray
    iterations: int
    angle_change_e: float
    angle_change_f: float


def refine_splitting(model: ModelSystem, x, iterations: int,
                     convergence_tol: float = 1e-8) -> RefineResult:
    """Refine the model's seed splitting at x by the graph transform.

    Pushes the seed F forward `iterations` steps from phi^{-iterations}(x) and
    pulls the seed E back from phi^{iterations}(x). Convergence is reported as
    the principal-angle change incurred by the final iteration; failure to meet
    `convergence_tol` raises with the full angle history.
    """
    if iterations < 1:
        raise ConfigError("refine_splitting needs iterations >= 1")
    seed = model.seed_splitting or model.splitting
    x = model.space.canonicalize(x)
    e_prev = _pullback_basis(model, x, seed.e_basis, iterations - 1) if iterations > 1 \
        else orth_columns(seed.e_basis(x))
    f_prev = _pushforward_basis(model, x, seed.f_basis, iterations - 1) if iterations > 1 \
        else orth_columns(seed.f_basis(x))
    e_new = _pullback_basis(model, x, seed.e_basis, iterations)
    f_new = _pushforward_basis(model, x, seed.f_basis, iterations)
    de = principal_angle_gap(e_prev, e_new)
    df = principal_angle_gap(f_prev, f_new)
    if max(de, df) > convergence_tol:
        hist_e = []
        hist_f = []
        prev_e, prev_f = orth_columns(seed.e_basis(x)), orth_columns(seed.f_basis(x))
        for m in range(1, iterations + 1):
            cur_e = _pullback_basis(model, x, seed.e_basis, m)
            cur_f = _pushforward_basis(model, x, seed.f_basis, m)
            hist_e.append(principal_angle_gap(prev_e, cur_e))
            hist_f.append(principal_angle_gap(prev_f, cur_f))
            prev_e, prev_f = cur_e, cur_f
        raise RefinementError(
            f"splitting refinement did not converge at {x} "
            f"(last angle change {max(de, df):.3e} > {convergence_tol:.1e})",
            {"e": hist_e, "f": hist_f},
        )
    return RefineResult(e_new, f_new, iterations, de, df)


def _memoized_point_fn(fn):
    cache: dict[bytes, np.ndarray] = {}

    def wrapped(x: np.ndarray) -> np.ndarray:
        key = np.asarray(x, dtype=float).tobytes()
        hit = cache.get(key)
        if hit is None:
            hit = fn(x)
            cache[key] = hit
        return hit

    return wrapped


def _refined_splitting_field(model: ModelSystem, seed: SplittingField, depth: int,
                             invariance_tol: float) -> SplittingField:
    """Pure refined splitting field with fixed depth; evaluations are memoized."""

    def e_basis(x):
        return _pullback_basis(model, model.space.canonicalize(x), seed.e_basis, depth)

    def f_basis(x):
        return _pushforward_basis(model, model.space.canonicalize(x), seed.f_basis, depth)

    return SplittingField(seed.dim_e, seed.dim_f,
                          _memoized_point_fn(e_basis), _memoized_point_fn(f_basis),
                          invariance_tol=invariance_tol)


# ---------------------------------------------------------------------------
# Zoo
# ---------------------------------------------------------------------------

def _as_int_matrix(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError("matrix must be square")
    if np.max(np.abs(a - np.round(a))) > 1e-9:
        raise ConfigError("toral automorphisms need integer matrices")
    a = np.round(a)
    det = round(float(np.linalg.det(a)))
    if abs(det) != 1:
        raise ConfigError(f"matrix must have |det| = 1, got det = {det}")
    return a


def _integer_inverse(a: np.ndarray) -> np.ndarray:
    inv = np.linalg.inv(a)
    return np.round(inv)  # unimodular integer matrices have integer inverses


def _real_invariant_blocks(a: np.ndarray):
    """Eigenstructure of a, as (modulus, real basis columns) blocks sorted by |lambda|."""
    ev, vec = np.linalg.eig(a)
    order = np.argsort(np.abs(ev), kind="stable")
    used: set[int] = set()
    blocks = []
    for idx in order:
        if idx in used:
            continue
        lam = ev[idx]
        v = vec[:, idx]
        if abs(lam.imag) <= 1e-10 * max(1.0, abs(lam)):
            blocks.append((abs(lam), [np.real(v)]))
            used.add(idx)
        else:
            partner = None
            for j in order:
                if j not in used and j != idx and abs(ev[j] - np.conj(lam)) <= 1e-8 * max(1.0, abs(lam)):
                    partner = j
                    break
            if partner is None:
                raise ConfigError("unpaired complex eigenvalue; matrix too degenerate")
            blocks.append((abs(lam), [np.real(v), np.imag(v)]))
            used.add(idx)
            used.add(partner)
    return blocks


def _eigen_splitting(a: np.ndarray, dim_e: int) -> tuple[np.ndarray, np.ndarray]:
    blocks = _real_invariant_blocks(a)
    cols: list[np.ndarray] = []
    moduli: list[float] = []
    for mod, vs in blocks:
        for v in vs:
            cols.append(v / np.linalg.norm(v))
            moduli.append(mod)
    n = a.shape[0]
    if not (1 <= dim_e <= n - 1):
        raise ConfigError(f"dim_e must be in [1, {n - 1}]")
    if abs(moduli[dim_e - 1] - moduli[dim_e]) <= 1e-9 * max(moduli):
        raise ConfigError("dim_e would cut an eigenvalue cluster / conjugate pair")
    basis = np.column_stack(cols)
    return basis[:, :dim_e], basis[:, dim_e:]


def _constant_splitting(e0: np.ndarray, f0: np.ndarray, tol: float = 1e-8) -> SplittingField:
    e0 = np.asarray(e0, dtype=float)
    f0 = np.asarray(f0, dtype=float)
    return SplittingField(e0.shape[1], f0.shape[1], lambda x: e0, lambda x: f0,
                          invariance_tol=tol)


def _linear_torus_model(name: str, a: np.ndarray, e0: np.ndarray, f0: np.ndarray,
                        params: dict) -> ModelSystem:
    ai = _integer_inverse(a)
    return ModelSystem(
        name=name,
        space=Space.torus(a.shape[0]),
        map_fn=lambda x, _a=a: _a @ x,
        inverse_fn=lambda x, _ai=ai: _ai @ x,
        jacobian_fn=lambda x, _a=a: _a,
        inverse_jacobian_fn=lambda x, _ai=ai: _ai,
        splitting=_constant_splitting(e0, f0),
        smoothness_tag="analytic",
        volume_preserving=True,
        params=params,
    )


def _build_identity(dimension: int = 3, dim_e: int = 2) -> ModelSystem:
    n = int(dimension)
    d = int(dim_e)
    if not (1 <= d <= n - 1):
        raise ConfigError("identity model needs 1 <= dim_e <= n-1")
    eye = np.eye(n)
    return ModelSystem(
        name="identity",
        space=Space.torus(n),
        map_fn=lambda x: x,
        inverse_fn=lambda x: x,
        jacobian_fn=lambda x, _i=eye: _i,
        inverse_jacobian_fn=lambda x, _i=eye: _i,
        splitting=_constant_splitting(eye[:, :d], eye[:, d:]),
        smoothness_tag="analytic",
        volume_preserving=True,
        params={"dimension": n, "dim_e": d},
    )


def _build_torus_auto(matrix=None, dim_e=None, blocks=None) -> ModelSystem:
    if blocks is not None:
        mats = [_as_int_matrix(b) for b in blocks]
        if len(mats) != 2:
            raise ConfigError("blocks takes exactly two matrices (E block, F block)")
        d, l = mats[0].shape[0], mats[1].shape[0]
        n = d + l
        a = np.zeros((n, n))
        a[:d, :d] = mats[0]
        a[d:, d:] = mats[1]
        eye = np.eye(n)
        e0, f0 = eye[:, :d], eye[:, d:]
        params = {"blocks": [m.astype(int).tolist() for m in mats]}
    else:
        if matrix is None:
            raise ConfigError("torus_auto needs 'matrix' or 'blocks'")
        a = _as_int_matrix(matrix)
        moduli = np.abs(np.linalg.eigvals(a))
        if dim_e is None:
            dim_e = int(np.clip(np.sum(moduli < 1.0 - 1e-12), 1, a.shape[0] - 1))
        e0, f0 = _eigen_splitting(a, int(dim_e))
        params = {"matrix": a.astype(int).tolist(), "dim_e": int(dim_e)}
    return _linear_torus_model("torus_auto", a, e0, f0, params)


def _build_cat3() -> ModelSystem:
    e0, f0 = _eigen_splitting(TRIBONACCI, 2)
    model = _linear_torus_model("cat3", TRIBONACCI, e0, f0,
                                {"matrix": TRIBONACCI.astype(int).tolist(), "dim_e": 2})
    return model


def _sine_profile(coord: int):
    def s(x):
        return np.sin(TWO_PI * x[coord])

    def ds(x):
        g = np.zeros_like(x)
        g[coord] = TWO_PI * np.cos(TWO_PI * x[coord])
        return g

    return s, ds


_PROFILES = {"sine": _sine_profile}


def _build_skew_shear(matrix2=None, tau: float = 0.25, epsilon: float = 0.0,
                      profile: str = "sine", refine_depth: int = 60) -> ModelSystem:
    a2 = _as_int_matrix(matrix2 if matrix2 is not None else [[2, 1], [1, 1]])
    if a2.shape != (2, 2):
        raise ConfigError("skew_shear base matrix must be 2x2")
    ev, vec = np.linalg.eig(a2)
    if np.any(np.abs(np.abs(ev) - 1.0) < 1e-9):
        raise ConfigError("skew_shear base automorphism must be hyperbolic")
    order = np.argsort(np.abs(ev))
    v_s = np.real(vec[:, order[0]])
    v_u = np.real(vec[:, order[1]])
    a2i = _integer_inverse(a2)
    if profile not in _PROFILES:
        raise ConfigError(f"unknown shear profile {profile!r}")
    s_fn, ds_fn = _PROFILES[profile](0)
    eps = float(epsilon)
    tau = float(tau)

    def map_fn(x):
        y = np.empty(3)
        y[:2] = a2 @ x[:2]
        y[2] = x[2] + tau + eps * s_fn(x[:2])
        return y

    def inverse_fn(x):
        y = np.empty(3)
        y[:2] = a2i @ x[:2]
        y[2] = x[2] - tau - eps * s_fn(y[:2])
        return y

    def jacobian_fn(x):
        j = np.eye(3)
        j[:2, :2] = a2
        j[2, :2] = eps * ds_fn(x[:2])
        return j

    e0 = np.column_stack([np.append(v_s / np.linalg.norm(v_s), 0.0), [0.0, 0.0, 1.0]])
    f0 = np.append(v_u / np.linalg.norm(v_u), 0.0).reshape(3, 1)
    seed = _constant_splitting(e0, f0)
    params = {"matrix2": a2.astype(int).tolist(), "tau": tau, "epsilon": eps,
              "profile": profile, "refine_depth": int(refine_depth)}
    model = ModelSystem(
        name="skew_shear",
        space=Space.torus(3),
        map_fn=map_fn,
        inverse_fn=inverse_fn,
        jacobian_fn=jacobian_fn,
        splitting=seed,
        smoothness_tag="analytic",
        volume_preserving=True,
        params=params,
        seed_splitting=seed,
    )
    if eps == 0.0:
        return model
    # E (stable + fiber span) is exactly invariant for any eps; only F needs refining.
    refined = _refined_splitting_field(model, seed, int(refine_depth), invariance_tol=1e-6)
    split = SplittingField(2, 1, seed.e_basis, refined.f_basis, invariance_tol=1e-6)
    return replace(model, splitting=split, smoothness_tag="numeric_splitting")


def _build_perturbed_auto(matrix=None, epsilon: float = 0.0, dim_e=None,
                          shear_direction: int = 0, shear_driver: int = 1,
                          profile: str = "sine", refine_depth: int = 60) -> ModelSystem:
    a = _as_int_matrix(matrix if matrix is not None else TRIBONACCI)
    n = a.shape[0]
    ai = _integer_inverse(a)
    i_dir, i_drv = int(shear_direction), int(shear_driver)
    if i_dir == i_drv or not (0 <= i_dir < n and 0 <= i_drv < n):
        raise ConfigError("shear direction and driver must be distinct coordinate indices")
    if profile not in _PROFILES:
        raise ConfigError(f"unknown shear profile {profile!r}")
    s_fn, _ = _PROFILES[profile](i_drv)
    eps = float(epsilon)
    moduli = np.abs(np.linalg.eigvals(a))
    if dim_e is None:
        dim_e = int(np.clip(np.sum(moduli < 1.0 - 1e-12), 1, n - 1))
    e0, f0 = _eigen_splitting(a, int(dim_e))

    def map_fn(x):
        y = a @ x
        out = y.copy()
        out[i_dir] += eps * s_fn(y)
        return out

    def inverse_fn(x):
        y = x.copy()
        y[i_dir] -= eps * s_fn(x)  # shear leaves the driver coordinate fixed
        return ai @ y

    def jacobian_fn(x):
        y = a @ x
        s = np.eye(n)
        s[i_dir, i_drv] += eps * TWO_PI * np.cos(TWO_PI * y[i_drv])
        return s @ a

    seed = _constant_splitting(e0, f0)
    params = {"matrix": a.astype(int).tolist(), "epsilon": eps, "dim_e": int(dim_e),
              "shear_direction": i_dir, "shear_driver": i_drv, "profile": profile,
              "refine_depth": int(refine_depth)}
    model = ModelSystem(
        name="perturbed_auto",
        space=Space.torus(n),
        map_fn=map_fn,
        inverse_fn=inverse_fn,
        jacobian_fn=jacobian_fn,
        splitting=seed,
        smoothness_tag="analytic",
        volume_preserving=True,
        params=params,
        seed_splitting=seed,
    )
    if eps == 0.0:
        return model
    refined = _refined_splitting_field(model, seed, int(refine_depth), invariance_tol=1e-6)
    return replace(model, splitting=refined, smoothness_tag="numeric_splitting")


def _build_contact_chart(halfwidth: float = 1.0) -> ModelSystem:
    hw = float(halfwidth)
    space = Space.box([[-hw, hw]] * 3)

    def e_basis(x):
        return np.array([[1.0, 0.0], [0.0, 1.0], [x[1], 0.0]])

    def f_basis(x):
        return np.array([[0.0], [0.0], [1.0]])

    eye = np.eye(3)
    return ModelSystem(
        name="contact_chart",
        space=space,
        map_fn=lambda x: x,
        inverse_fn=lambda x: x,
        jacobian_fn=lambda x, _i=eye: _i,
        inverse_jacobian_fn=lambda x, _i=eye: _i,
        splitting=SplittingField(2, 1, e_basis, f_basis),
        smoothness_tag="analytic",
        volume_preserving=True,
        params={"halfwidth": hw},
    )


_ZOO: dict[str, Callable[..., ModelSystem]] = {
    "identity": _build_identity,
    "torus_auto": _build_torus_auto,
    "cat3": _build_cat3,
    "skew_shear": _build_skew_shear,
    "perturbed_auto": _build_perturbed_auto,
    "contact_chart": _build_contact_chart,
}

ZOO_DESCRIPTIONS = {
    "identity": "identity map on T^n with a coordinate splitting (no domination)",
    "torus_auto": "linear toral automorphism; splitting from eigenvalue moduli or explicit blocks",
    "cat3": "tribonacci automorphism of T^3; E = contracting eigenplane, F = expanding line",
    "skew_shear": "fiber skew product over a hyperbolic 2D automorphism with sheared translation",
    "perturbed_auto": "toral automorphism composed with a volume-preserving coordinate shear",
    "contact_chart": "identity dynamics on a box with the non-involutive contact plane field",
}

ZOO_EXAMPLE_PARAMS = {
    "identity": {},
    "torus_auto": {"matrix": [[2, 1], [1, 1]]},
    "cat3": {},
    "skew_shear": {"matrix2": [[2, 1], [1, 1]], "tau": 0.25, "epsilon": 0.02},
    "perturbed_auto": {"epsilon": 0.01},
    "contact_chart": {},
}


def model_zoo(name: str, **params) -> ModelSystem:
    try:
        builder = _ZOO[name]
    except KeyError:
        raise UnknownModelError(
            f"unknown model {name!r}; available: {', '.join(sorted(_ZOO))}"
        ) from None
    return builder(**params)


def zoo_entries() -> list[dict]:
    """Catalog rows for the CLI listing, with hypothesis tags."""
    rows = []
    for name in sorted(_ZOO):
        model = model_zoo(name, **ZOO_EXAMPLE_PARAMS[name])
        rows.append({
            "name": name,
            "description": ZOO_DESCRIPTIONS[name],
            "example_params": ZOO_EXAMPLE_PARAMS[name],
            "dimension": model.dim,
            "dim_e": model.splitting.dim_e,
            "dim_f": model.splitting.dim_f,
            "volume_preserving": model.volume_preserving,
            "splitting": model.smoothness_tag,
            "space": model.space.kind,
        })
    return rows


def swap_splitting(model: ModelSystem) -> ModelSystem:
    """Model with the roles of E and F exchanged (for controls and tests)."""
    s = model.splitting
    return replace(model, splitting=SplittingField(
        s.dim_f, s.dim_e, s.f_basis, s.e_basis, invariance_tol=s.invariance_tol))


def require_integrability_hypotheses(model: ModelSystem) -> None:
    """Gate shared by the domination/involutivity diagnostics."""
    if model.dim < 3:
        raise ModelAssumptionError("integrability diagnostics need dim(M) >= 3")
    if model.splitting.dim_e < 2:
        raise ModelAssumptionError("dim(E) >= 2 required")
    if model.splitting.dim_f < 1:
        raise ModelAssumptionError("dim(F) >= 1 required")


def check_splitting_condition(model: ModelSystem, x, max_cond: float = 1e8,
                              orbit_index: int = 0) -> float:
    cond = model.splitting.joint_condition(model.space.canonicalize(x))
    if not np.isfinite(cond) or cond > max_cond:
        raise SplittingDegeneracyError(orbit_index, cond)
    return cond


def load_model_table(table: dict) -> ModelSystem:
    if "name" not in table:
        raise ConfigError("model table is missing the 'name' field")
    params = dict(table.get("params", {}))
    for key, val in table.items():
        if key not in ("name", "params"):
            params[key] = val
    return model_zoo(table["name"], **params)


def load_model_config(path) -> ModelSystem:
    """Model from the [model] table of a TOML config file."""
    with open(path, "rb") as fh:
        data = _toml.load(fh)
    if "model" not in data:
        raise ConfigError(f"{path}: missing [model] table")
    return load_model_table(data["model"])
