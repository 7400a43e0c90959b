"""Lyapunov spectra along orbits and their relation to singular-value growth.

Exponents come from the standard re-orthonormalized (QR) product accumulation
of per-step log stretch factors. The growth-rate check compares (1/k) ln s^k_l
from the cocycle module against the exponents over a horizon grid, and a
random-subspace min-max oracle validates singular values independently of any
SVD routine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cocycle import _step_matrices, log_singular_sequence
from .errors import ConfigError, OracleViolationError
from .models import ModelSystem


@dataclass(frozen=True)
class LyapunovEstimate:
    point: np.ndarray
    horizon: int
    subbundle: str
    exponents: np.ndarray              # ascending
    checkpoints: list   # (k, exponents ascending) at k/10, 2k/10, ...

    @property
    def checkpoint_spread(self) -> float:
        """Max movement of any exponent over the last two checkpoints."""
        if len(self.checkpoints) < 2:
            return float("nan")
        a, b = self.checkpoints[-2][1], self.checkpoints[-1][1]
        return float(np.max(np.abs(a - b)))


def lyapunov_spectrum(model: ModelSystem, x, k: int, subbundle: str = "full") -> LyapunovEstimate:
    """Benettin-style QR accumulation over the forward orbit; deterministic."""
    if k < 100:
        raise ConfigError("lyapunov_spectrum needs k >= 100")
    x = model.space.canonicalize(x)
    steps, frame_start, _ = _step_matrices(model, x, k, subbundle)
    m = frame_start.shape[1]
    q = np.eye(m)
    sums = np.zeros(m)
    checkpoints = []
    marks = {max(1, (k * j) // 10): j for j in range(1, 11)}
    for j, step in enumerate(steps):
        z = step @ q
        q, r = np.linalg.qr(z)
        diag = np.diag(r)
        signs = np.sign(diag)
        signs[signs == 0.0] = 1.0
        q = q * signs
        sums += np.log(np.abs(diag))
        if j + 1 in marks:
            checkpoints.append((j + 1, np.sort(sums / (j + 1))))
    return LyapunovEstimate(x, k, subbundle, np.sort(sums / k), checkpoints)


def group_exponents(values: np.ndarray, spread: float) -> list[tuple[float, int]]:
    """Cluster near-equal exponent estimates into (value, multiplicity) groups.

    Estimates within `spread` of the running group mean are merged; use
    10x the final checkpoint spread as a data-driven tolerance.
    """
    groups: list[list[float]] = []
    for v in np.sort(np.asarray(values, dtype=float)):
        if groups and abs(v - np.mean(groups[-1])) <= spread:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


@dataclass(frozen=True)
class RegularityReport:
    point: np.ndarray
    subbundle: str
    k_grid: tuple
    exponents: np.ndarray        # reference exponents, ascending
    rates: np.ndarray            # (len(grid), m): (1/k) ln s^k_l, ascending per row
    deviations: np.ndarray       # |rates - exponents|
    max_deviation_at_largest: float
    decay_slope: float           # lsq slope of ln(max_l deviation) vs ln k


def regularity_check(model: ModelSystem, x, k_grid, subbundle: str = "full",
                     exponents: np.ndarray | None = None) -> RegularityReport:
    """Deviation |(1/k) ln s^k_l - lambda_l| over the horizon grid.

    The reference exponents default to lyapunov_spectrum at the largest grid
    value, so the two accumulation routes (QR stretch sums vs exact product
    singular values) cross-check each other.
    """
    ks = sorted(int(k) for k in k_grid)
    if exponents is None:
        exponents = lyapunov_spectrum(model, x, max(ks), subbundle).exponents
    exponents = np.sort(np.asarray(exponents, dtype=float))
    logs = log_singular_sequence(model, x, ks, subbundle, sign=1)
    rates = np.sort(logs, axis=1) / np.array(ks, dtype=float)[:, None]
    devs = np.abs(rates - exponents[None, :])
    worst = devs.max(axis=1)
    slope = float(np.polyfit(np.log(ks), np.log(np.maximum(worst, 1e-300)), 1)[0]) \
        if len(ks) >= 2 else float("nan")
    return RegularityReport(model.space.canonicalize(x), subbundle, tuple(ks),
                            exponents, rates, devs, float(worst[-1]), slope)


# ---------------------------------------------------------------------------
# Random-subspace min-max oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CourantFischerRecord:
    dim: int
    trials: int
    seed: int
    min_upper_slack: float   # min over draws of |A|_W| - s_l  (must be >= -tol)
    min_lower_slack: float   # min over draws of s_l - m(A|_V)
    max_equality_gap: float  # attained on the singular subspaces


def _restricted_extremes(a: np.ndarray, basis: np.ndarray) -> tuple[float, float]:
    s = np.linalg.svd(a @ basis, compute_uv=False)
    return float(s[0]), float(s[-1])


def courant_fischer_oracle(matrix: np.ndarray, trials: int = 200,
                           seed: int = 0, tol: float = 1e-10) -> CourantFischerRecord:
    """Check every singular value against random-subspace min-max bounds.

    For each l (ascending singular values s_1 <= ... <= s_n): any subspace V of
    dim n-l+1 gives m(A|_V) <= s_l, any W of dim l gives |A|_W| >= s_l, and both
    bounds are attained on the corresponding singular subspaces. A violation
    raises OracleViolationError with the witness subspace (it would indicate an
    SVD or restriction bug, not a property of the matrix). Draws are batched
    per l (stacked QR and SVD).
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError("courant_fischer_oracle expects a square matrix")
    if trials < 1:
        raise ConfigError("trials >= 1 required")
    n = a.shape[0]
    _, s_desc, vt = np.linalg.svd(a)
    s = s_desc[::-1]
    v_asc = vt.T[:, ::-1]
    rng = np.random.default_rng(seed)
    min_upper = np.inf
    min_lower = np.inf
    max_eq_gap = 0.0
    for ell in range(1, n + 1):
        s_ell = s[ell - 1]
        v_draws, _ = np.linalg.qr(rng.standard_normal((trials, n, n - ell + 1)))
        w_draws, _ = np.linalg.qr(rng.standard_normal((trials, n, ell)))
        conorms = np.linalg.svd(a @ v_draws, compute_uv=False)[:, -1]
        norms = np.linalg.svd(a @ w_draws, compute_uv=False)[:, 0]
        min_lower = min(min_lower, float(np.min(s_ell - conorms)))
        min_upper = min(min_upper, float(np.min(norms - s_ell)))
        bad_v = int(np.argmax(conorms)) if conorms.max() > s_ell + tol else None
        if bad_v is not None:
            raise OracleViolationError(
                f"co-norm bound violated at l={ell}: m(A|_V)={conorms[bad_v]} > s_l={s_ell}",
                witness={"l": ell, "trial": bad_v, "basis": v_draws[bad_v]})
        bad_w = int(np.argmin(norms)) if norms.min() < s_ell - tol else None
        if bad_w is not None:
            raise OracleViolationError(
                f"norm bound violated at l={ell}: |A|_W|={norms[bad_w]} < s_l={s_ell}",
                witness={"l": ell, "trial": bad_w, "basis": w_draws[bad_w]})
        _, conorm_star = _restricted_extremes(a, v_asc[:, ell - 1:])
        norm_star, _ = _restricted_extremes(a, v_asc[:, :ell])
        max_eq_gap = max(max_eq_gap, abs(conorm_star - s_ell), abs(norm_star - s_ell))
    if max_eq_gap > 1e-8 * max(1.0, float(s[-1])):
        raise OracleViolationError(
            f"equality not attained on singular subspaces (gap {max_eq_gap:.3e})",
            witness={"matrix": a})
    return CourantFischerRecord(n, trials, seed, float(min_upper), float(min_lower),
                                float(max_eq_gap))


# ---------------------------------------------------------------------------
# Exponent arithmetic condition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentMargins:
    mu: np.ndarray       # E exponents, ascending
    lam: np.ndarray      # F exponents, ascending
    margins: dict        # (i, j, m) 1-based, i < j -> mu_i + mu_j - lam_m
    min_abs_margin: float

    def side(self, i: int, j: int, m: int, tol: float = 0.0) -> str:
        """Which time direction the (i, j, m) ratio decays in."""
        g = self.margins[(i, j, m)]
        if g < -tol:
            return "forward"
        if g > tol:
            return "backward"
        return "resonant"


def exponent_condition(model: ModelSystem, x, k: int = 1000) -> ExponentMargins:
    """Pairwise-sum margins mu_i + mu_j - lam_m between E and F spectra.

    Index pairs are distinct (i < j), matching the per-triple rate tables.
    """
    mu = lyapunov_spectrum(model, x, k, "E").exponents
    lam = lyapunov_spectrum(model, x, k, "F").exponents
    margins = {}
    d, l = len(mu), len(lam)
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            for m in range(1, l + 1):
                margins[(i, j, m)] = float(mu[i - 1] + mu[j - 1] - lam[m - 1])
    min_abs = min(abs(v) for v in margins.values())
    return ExponentMargins(mu, lam, margins, float(min_abs))
