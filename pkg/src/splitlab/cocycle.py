"""Restricted derivative cocycles and their singular data.

Dphi^{+-k} restricted to a subbundle is accumulated one step at a time between
orthonormal frames of the bundle along the orbit (frames are recomputed from
the splitting field at every step, never propagated). The running product is
kept as U diag(exp(w)) V^T with per-direction log scales, so all singular
values remain exact in log space for arbitrarily long products.

Ordering convention: forward singular values are reported ascending
(s^k_1 <= ... <= s^k_d), backward ones descending (s^{-k}_1 >= ...), and the
sign of k is stored explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SplittingDegeneracyError
from .linalg import LogProduct, orth_columns
from .models import ModelSystem, orbit

SUBBUNDLES = ("E", "F", "full")


def _basis_fn(model: ModelSystem, subbundle: str):
    if subbundle == "E":
        return model.splitting.e_basis
    if subbundle == "F":
        return model.splitting.f_basis
    if subbundle == "full":
        eye = np.eye(model.dim)
        return lambda x: eye
    raise ConfigError(f"subbundle must be one of {SUBBUNDLES}, got {subbundle!r}")


def _check_degeneracy(model: ModelSystem, x: np.ndarray, index: int,
                      max_cond: float = 1e8) -> None:
    cond = model.splitting.joint_condition(x)
    if not np.isfinite(cond) or cond > max_cond:
        raise SplittingDegeneracyError(index, cond)


def _step_matrices(model: ModelSystem, x, k: int, subbundle: str):
    """One-step restricted derivatives along the orbit of x.

    Returns (steps, frame_start, frame_end) where steps[j] is the matrix of
    the one-step derivative (inverse derivative for k < 0) between orthonormal
    frames at consecutive orbit points.
    """
    basis = _basis_fn(model, subbundle)
    pts = orbit(model, x, k)
    check = subbundle != "full"
    frames = []
    for j, p in enumerate(pts):
        if check:
            _check_degeneracy(model, p, j if k >= 0 else -j)
        frames.append(orth_columns(basis(p)))
    deriv = model.jacobian_fn if k >= 0 else model.inverse_jacobian
    steps = [frames[j + 1].T @ (deriv(pts[j]) @ frames[j]) for j in range(abs(k))]
    return steps, frames[0], frames[-1]


@dataclass(frozen=True)
class RestrictedCocycle:
    """Log-scaled representation of Dphi^k restricted to a subbundle."""

    base_point: np.ndarray
    steps: int
    subbundle: str
    u: np.ndarray            # left singular directions, in the end frame
    values_log_desc: np.ndarray
    v: np.ndarray            # right singular directions, in the start frame
    frame_start: np.ndarray  # (n, m) orthonormal columns at x
    frame_end: np.ndarray    # (n, m) orthonormal columns at phi^k(x)

    @property
    def dim(self) -> int:
        return self.values_log_desc.shape[0]

    @property
    def log_scale(self) -> float:
        """Natural log of the factored-out magnitude (the spectral norm)."""
        return float(self.values_log_desc[0])

    @property
    def matrix(self) -> np.ndarray:
        """Unit-scaled product: true restricted map = exp(log_scale) * matrix."""
        w = self.values_log_desc
        return self.u @ np.diag(np.exp(w - w[0])) @ self.v.T


@dataclass(frozen=True)
class SingularData:
    """Singular values/vectors in the ordering convention for sign(steps)."""

    steps: int
    values_log: np.ndarray    # ascending for k > 0, descending for k < 0
    right_vectors: np.ndarray  # (n, m) columns in the subbundle at the base point
    order: str                # "ascending" | "descending"


def restricted_cocycle(model: ModelSystem, x, k: int, subbundle: str) -> RestrictedCocycle:
    if k == 0:
        raise ConfigError("restricted_cocycle needs |k| >= 1")
    x = model.space.canonicalize(x)
    steps, frame_start, frame_end = _step_matrices(model, x, k, subbundle)
    prod = LogProduct(frame_start.shape[1])
    for step in steps:
        prod.step(step)
    return RestrictedCocycle(
        base_point=x, steps=k, subbundle=subbundle,
        u=prod.u, values_log_desc=prod.w.copy(), v=prod.v,
        frame_start=frame_start, frame_end=frame_end,
    )


def singular_data(cocycle: RestrictedCocycle) -> SingularData:
    w = cocycle.values_log_desc
    vecs = cocycle.frame_start @ cocycle.v
    if cocycle.steps > 0:
        return SingularData(cocycle.steps, w[::-1].copy(), vecs[:, ::-1].copy(), "ascending")
    return SingularData(cocycle.steps, w.copy(), vecs.copy(), "descending")


def norm_conorm(model: ModelSystem, x, k: int, subbundle: str) -> tuple[float, float]:
    """(ln norm, ln co-norm) of Dphi^k restricted to the subbundle."""
    coc = restricted_cocycle(model, x, k, subbundle)
    return float(coc.values_log_desc[0]), float(coc.values_log_desc[-1])


def log_singular_sequence(model: ModelSystem, x, ks, subbundle: str,
                          sign: int = 1) -> np.ndarray:
    """Log singular values (descending rows) at every k in `ks`, one orbit pass.

    ks must be strictly increasing positive integers; row i holds the values of
    the |k|=ks[i] cocycle in direction `sign`. Shape (len(ks), m).
    """
    ks = [int(k) for k in ks]
    if not ks or any(k <= 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ConfigError("ks must be strictly increasing positive integers")
    if sign not in (1, -1):
        raise ConfigError("sign must be +1 or -1")
    x = model.space.canonicalize(x)
    steps, frame_start, _ = _step_matrices(model, x, sign * ks[-1], subbundle)
    prod = LogProduct(frame_start.shape[1])
    out = np.empty((len(ks), frame_start.shape[1]))
    wanted = {k: i for i, k in enumerate(ks)}
    for j, step in enumerate(steps):
        prod.step(step)
        if j + 1 in wanted:
            out[wanted[j + 1]] = prod.w
    return out


def pair_log_sequences(model: ModelSystem, x, k_max: int):
    """Per-k log singular values of E and F cocycles, forward and backward.

    Returns dict with keys ("E", 1), ("E", -1), ("F", 1), ("F", -1), each an
    array of shape (k_max, dim) with descending rows; row j is k = j+1.
    """
    ks = range(1, k_max + 1)
    return {
        (sub, sign): log_singular_sequence(model, x, ks, sub, sign)
        for sub in ("E", "F") for sign in (1, -1)
    }
