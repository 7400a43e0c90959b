"""Domination diagnostics for invariant splittings.

Evaluates, with quantitative margins, the pointwise one-step conditions
(dynamical domination |Dphi|_E| / m(Dphi|_F) < 1, volume and inverse-volume
domination of the restricted determinants), the second-order subsequence
condition (the top two E singular values against the F co-norm, forward and
backward, with a liminf proxy), and the per-index-triple exponential bounds
whose side (forward/backward) may depend on the triple (non-resonance).

The liminf over infinite horizons is replaced by a running minimum plus a
least-squares slope over k <= k_max; raw sequences are always reported so
callers can apply their own criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .cocycle import pair_log_sequences, restricted_cocycle
from .errors import ConfigError, ModelAssumptionError
from .models import ModelSystem, require_integrability_hypotheses

RATE_FLOOR = 1e-3    # minimal |slope| to call a direction decaying
MIN_DROP = 5.0       # required depth of the running minimum for a verdict


@dataclass(frozen=True)
class PointRatios:
    point: np.ndarray
    dyn_ratio: float       # |Dphi|_E| / m(Dphi|_F)
    vol_ratio_fwd: float   # |det Dphi|_E| / |det Dphi|_F|
    vol_ratio_bwd: float   # same for Dphi^{-1}

    @property
    def exclusive(self) -> bool:
        """Volume domination in both time directions at once is impossible."""
        return not (self.vol_ratio_fwd < 1.0 and self.vol_ratio_bwd < 1.0)


def pointwise_ratios(model: ModelSystem, x) -> PointRatios:
    x = model.space.canonicalize(x)
    e_f = restricted_cocycle(model, x, 1, "E").values_log_desc
    f_f = restricted_cocycle(model, x, 1, "F").values_log_desc
    e_b = restricted_cocycle(model, x, -1, "E").values_log_desc
    f_b = restricted_cocycle(model, x, -1, "F").values_log_desc
    return PointRatios(
        point=x,
        dyn_ratio=float(np.exp(e_f[0] - f_f[-1])),
        vol_ratio_fwd=float(np.exp(e_f.sum() - f_f.sum())),
        vol_ratio_bwd=float(np.exp(e_b.sum() - f_b.sum())),
    )


@dataclass(frozen=True)
class VolumeImplicationReport:
    points: np.ndarray
    det_products: np.ndarray      # det Dphi|_E * det Dphi|_F per point
    max_det_error: float          # max |det*det - 1|
    det_tol: float
    implication_failures: list    # points where dyn<1 but vol_fwd>=1
    det_ok: bool
    implication_ok: bool


def check_volume_implication(model: ModelSystem, sample_points,
                             det_tol: float = 1e-8) -> VolumeImplicationReport:
    """On volume-preserving 3D models with dim(E)=2: dynamical domination must
    imply volume domination, and the product of restricted determinants is
    checked against 1 at `det_tol`."""
    if not model.volume_preserving:
        raise ModelAssumptionError("model is not declared volume preserving")
    if model.dim != 3 or model.splitting.dim_e != 2:
        raise ModelAssumptionError("check needs dim(M)=3 and dim(E)=2")
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    dets = np.empty(len(pts))
    failures = []
    for idx, p in enumerate(pts):
        r = pointwise_ratios(model, p)
        e_f = restricted_cocycle(model, r.point, 1, "E").values_log_desc
        f_f = restricted_cocycle(model, r.point, 1, "F").values_log_desc
        dets[idx] = np.exp(e_f.sum() + f_f.sum())
        if r.dyn_ratio < 1.0 and not r.vol_ratio_fwd < 1.0:
            failures.append(r.point)
    max_err = float(np.max(np.abs(dets - 1.0)))
    return VolumeImplicationReport(
        points=pts, det_products=dets, max_det_error=max_err, det_tol=det_tol,
        implication_failures=failures,
        det_ok=max_err <= det_tol, implication_ok=not failures,
    )


def _running_min(seq: np.ndarray) -> float:
    return float(np.min(seq))


def _slope(seq: np.ndarray) -> float:
    ks = np.arange(1, len(seq) + 1, dtype=float)
    return float(np.polyfit(ks, seq, 1)[0])


@dataclass(frozen=True)
class SecondOrderDiagnostic:
    """ln(s^k_{d-1} s^k_d / r^k_1) forward and its backward mirror, k = 1..k_max."""

    point: np.ndarray
    k_max: int
    fwd_log_ratios: np.ndarray
    bwd_log_ratios: np.ndarray
    fwd_min: float
    bwd_min: float
    fwd_slope: float
    bwd_slope: float
    verdict: str   # forward | backward | both | neither


def _verdict(fwd_min, fwd_slope, bwd_min, bwd_slope,
             rate_floor: float, min_drop: float) -> str:
    fwd = fwd_slope < -rate_floor and fwd_min < -min_drop
    bwd = bwd_slope < -rate_floor and bwd_min < -min_drop
    if fwd and bwd:
        return "both"
    if fwd:
        return "forward"
    if bwd:
        return "backward"
    return "neither"


def _second_order_from_sequences(x, k_max, seqs, rate_floor, min_drop) -> SecondOrderDiagnostic:
    # rows are descending; the top pair of E is rows[:, :2], the F co-norm the last column
    ef, ff = seqs[("E", 1)], seqs[("F", 1)]
    eb, fb = seqs[("E", -1)], seqs[("F", -1)]
    fwd = ef[:, 0] + ef[:, 1] - ff[:, -1]
    bwd = eb[:, 0] + eb[:, 1] - fb[:, -1]
    return SecondOrderDiagnostic(
        point=x, k_max=k_max,
        fwd_log_ratios=fwd, bwd_log_ratios=bwd,
        fwd_min=_running_min(fwd), bwd_min=_running_min(bwd),
        fwd_slope=_slope(fwd), bwd_slope=_slope(bwd),
        verdict=_verdict(_running_min(fwd), _slope(fwd),
                         _running_min(bwd), _slope(bwd), rate_floor, min_drop),
    )


def second_order_diagnostic(model: ModelSystem, x, k_max: int,
                            rate_floor: float = RATE_FLOOR,
                            min_drop: float = MIN_DROP) -> SecondOrderDiagnostic:
    require_integrability_hypotheses(model)
    if k_max < 10:
        raise ConfigError("second_order_diagnostic needs k_max >= 10")
    x = model.space.canonicalize(x)
    return _second_order_from_sequences(x, k_max, pair_log_sequences(model, x, k_max),
                                        rate_floor, min_drop)


@dataclass(frozen=True)
class TripleRate:
    side: str            # forward | backward | both | neither
    rate_fwd: float      # largest lambda with ln-ratio <= -lambda k for all k
    rate_bwd: float
    slope_fwd: float     # least-squares slope of the ln-ratio sequence
    slope_bwd: float
    worst_k_fwd: int     # k attaining the uniform-rate minimum
    worst_k_bwd: int


@dataclass(frozen=True)
class NonresonanceTable:
    point: np.ndarray
    k_max: int
    triples: dict        # (i, j, m) 1-based, i < j -> TripleRate
    extreme_implication_ok: bool

    def all_sides(self) -> dict:
        return {key: tr.side for key, tr in self.triples.items()}


def _uniform_rate(seq: np.ndarray) -> tuple[float, int]:
    """Largest lambda with seq[k-1] <= -lambda*k for every k (min of -seq/k)."""
    ks = np.arange(1, len(seq) + 1, dtype=float)
    vals = -seq / ks
    idx = int(np.argmin(vals))
    return float(vals[idx]), idx + 1


def _nonresonance_from_sequences(x, k_max, seqs, d, l, rate_floor) -> NonresonanceTable:
    # index i follows the forward-ascending convention; rows store descending values,
    # so s^k_i sits at row column d-i
    ef, ff = seqs[("E", 1)], seqs[("F", 1)]
    eb, fb = seqs[("E", -1)], seqs[("F", -1)]
    triples = {}
    index_pairs = [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]
    for (i, j), m in product(index_pairs, range(1, l + 1)):
        fwd = ef[:, d - i] + ef[:, d - j] - ff[:, l - m]
        bwd = eb[:, i - 1] + eb[:, j - 1] - fb[:, m - 1]
        rate_f, k_f = _uniform_rate(fwd)
        rate_b, k_b = _uniform_rate(bwd)
        ok_f, ok_b = rate_f > rate_floor, rate_b > rate_floor
        side = "both" if (ok_f and ok_b) else "forward" if ok_f \
            else "backward" if ok_b else "neither"
        triples[(i, j, m)] = TripleRate(side, rate_f, rate_b,
                                        _slope(fwd), _slope(bwd), k_f, k_b)
    # if the extreme forward triple (d-1, d, 1) admits a uniform rate, every
    # forward sequence is dominated by it, hence every triple admits that rate
    extreme = triples[(d - 1, d, 1)]
    implication_ok = True
    if extreme.rate_fwd > rate_floor:
        lam = extreme.rate_fwd
        ks = np.arange(1, k_max + 1, dtype=float)
        for i, j, m in triples:
            fwd = ef[:, d - i] + ef[:, d - j] - ff[:, l - m]
            if np.any(fwd > -lam * ks + 1e-10 * ks):
                implication_ok = False
    return NonresonanceTable(x, k_max, triples, implication_ok)


def nonresonance_diagnostic(model: ModelSystem, x, k_max: int,
                            rate_floor: float = RATE_FLOOR) -> NonresonanceTable:
    """Per-index-triple uniform exponential bounds, forward and backward.

    Triples run over distinct pairs i < j (the pairs that carry brackets of
    distinct frame directions); the extreme forward triple is (d-1, d, 1).
    """
    require_integrability_hypotheses(model)
    if k_max < 10:
        raise ConfigError("nonresonance_diagnostic needs k_max >= 10")
    x = model.space.canonicalize(x)
    return _nonresonance_from_sequences(x, k_max, pair_log_sequences(model, x, k_max),
                                        model.splitting.dim_e, model.splitting.dim_f,
                                        rate_floor)


@dataclass(frozen=True)
class DominationReport:
    point: np.ndarray
    k_max: int
    ratios: PointRatios
    second_order: SecondOrderDiagnostic
    nonresonance: NonresonanceTable
    sequences: dict | None = None   # ("E"|"F", +-1) -> (k_max, dim) log singular values

    @property
    def exclusivity_ok(self) -> bool:
        return self.ratios.exclusive


def domination_report(model: ModelSystem, x, k_max: int,
                      rate_floor: float = RATE_FLOOR,
                      min_drop: float = MIN_DROP) -> DominationReport:
    require_integrability_hypotheses(model)
    if k_max < 10:
        raise ConfigError("domination_report needs k_max >= 10")
    x = model.space.canonicalize(x)
    seqs = pair_log_sequences(model, x, k_max)
    return DominationReport(
        point=x, k_max=k_max,
        ratios=pointwise_ratios(model, x),
        second_order=_second_order_from_sequences(x, k_max, seqs, rate_floor, min_drop),
        nonresonance=_nonresonance_from_sequences(x, k_max, seqs,
                                                  model.splitting.dim_e,
                                                  model.splitting.dim_f, rate_floor),
        sequences=seqs,
    )
