import numpy as np
import pytest

from splitlab.cocycle import _step_matrices
from splitlab.domination import (check_volume_implication, domination_report,
                                 nonresonance_diagnostic, pointwise_ratios,
                                 second_order_diagnostic)
from splitlab.errors import ConfigError, ModelAssumptionError
from splitlab.linalg import orth_columns
from splitlab.models import swap_splitting


def direct_restriction(model, x, subbundle):
    basis = model.splitting.e_basis if subbundle == "E" else model.splitting.f_basis
    q0 = orth_columns(basis(x))
    q1 = orth_columns(basis(model.step(x)))
    return q1.T @ model.jacobian_fn(x) @ q0


def test_cat3_ratios_against_direct_oracle(cat3, stretch_root, base_point):
    r = pointwise_ratios(cat3, base_point)
    me = direct_restriction(cat3, base_point, "E")
    mf = direct_restriction(cat3, base_point, "F")
    norm_e = np.linalg.svd(me, compute_uv=False)[0]
    conorm_f = np.linalg.svd(mf, compute_uv=False)[-1]
    assert r.dyn_ratio == pytest.approx(norm_e / conorm_f, rel=1e-10)
    assert r.dyn_ratio < 1.0
    # the volume ratio is exactly t^-2 (determinants see only eigenvalue moduli)
    assert r.vol_ratio_fwd == pytest.approx(stretch_root ** -2, rel=1e-10)
    assert r.vol_ratio_bwd == pytest.approx(stretch_root ** 2, rel=1e-10)


def test_identity_ratios_all_one(identity3, base_point):
    r = pointwise_ratios(identity3, base_point)
    assert r.dyn_ratio == pytest.approx(1.0, abs=1e-12)
    assert r.vol_ratio_fwd == pytest.approx(1.0, abs=1e-12)
    assert r.vol_ratio_bwd == pytest.approx(1.0, abs=1e-12)
    assert r.exclusive  # neither strict inequality holds


def test_swapped_splitting_reciprocal_volume_ratio(cat3, stretch_root, base_point):
    swapped = swap_splitting(cat3)
    r = pointwise_ratios(swapped, base_point)
    assert r.vol_ratio_fwd == pytest.approx(stretch_root ** 2, rel=1e-10)
    assert r.vol_ratio_bwd < 1.0  # inverse volume dominated


def test_volume_implication_cat3(cat3):
    pts = cat3.space.random_points(100, seed=23)
    rep = check_volume_implication(cat3, pts)
    assert rep.implication_ok
    assert rep.det_ok
    assert rep.max_det_error <= 1e-12


def test_volume_implication_identity_vacuous(identity3):
    pts = identity3.space.random_points(20, seed=2)
    rep = check_volume_implication(identity3, pts)
    assert rep.implication_ok  # antecedent (dyn < 1) is false everywhere
    assert rep.det_ok


def test_volume_implication_perturbed(perturbed001):
    # implication holds; the determinant product carries the O(eps)
    # splitting-angle factor, so it cannot meet 1e-8 (see decisions ledger)
    pts = perturbed001.space.random_points(30, seed=29)
    rep = check_volume_implication(perturbed001, pts)
    assert rep.implication_ok
    assert not rep.det_ok
    assert 1e-6 < rep.max_det_error < 0.1


def test_volume_implication_gate(contact):
    swapped = swap_splitting(contact)  # dim_e = 1 violates the hypotheses
    with pytest.raises(ModelAssumptionError):
        check_volume_implication(swapped, np.zeros((1, 3)))


def test_second_order_cat3(cat3, stretch_root, base_point):
    diag = second_order_diagnostic(cat3, base_point, 50)
    assert diag.fwd_slope == pytest.approx(-2 * np.log(stretch_root), abs=1e-3)
    assert diag.verdict == "forward"
    assert diag.fwd_min < -50.0
    assert diag.bwd_slope == pytest.approx(2 * np.log(stretch_root), abs=1e-3)


def test_second_order_gate_dim_e(cat3, base_point):
    swapped = swap_splitting(cat3)  # dim(E) = 1
    with pytest.raises(ModelAssumptionError):
        second_order_diagnostic(swapped, base_point, 20)
    with pytest.raises(ConfigError):
        second_order_diagnostic(cat3, base_point, 5)


def test_second_order_identity_neither(identity3, base_point):
    diag = second_order_diagnostic(identity3, base_point, 20)
    assert np.allclose(diag.fwd_log_ratios, 0.0, atol=1e-12)
    assert np.allclose(diag.bwd_log_ratios, 0.0, atol=1e-12)
    assert diag.verdict == "neither"


def test_three_dim_identification_with_determinant_sequence(cat3, base_point):
    """For d=2, l=1 the second-order sequence IS the determinant-ratio sequence."""
    k_max = 30
    diag = second_order_diagnostic(cat3, base_point, k_max)
    # independent accumulation: per-step log determinant sums
    steps_e, _, _ = _step_matrices(cat3, base_point, k_max, "E")
    steps_f, _, _ = _step_matrices(cat3, base_point, k_max, "F")
    det_seq = np.cumsum([np.log(abs(np.linalg.det(m))) for m in steps_e]) \
        - np.cumsum([np.log(abs(np.linalg.det(m))) for m in steps_f])
    assert np.allclose(diag.fwd_log_ratios, det_seq, atol=1e-10)


def test_nonresonance_cat3(cat3, stretch_root, base_point):
    table = nonresonance_diagnostic(cat3, base_point, 40)
    assert set(table.triples) == {(1, 2, 1)}
    tr = table.triples[(1, 2, 1)]
    assert tr.side == "forward"
    assert tr.rate_fwd == pytest.approx(2 * np.log(stretch_root), abs=1e-9)
    assert tr.slope_fwd == pytest.approx(-2 * np.log(stretch_root), abs=1e-3)
    assert table.extreme_implication_ok


def test_nonresonance_identity(identity3, base_point):
    table = nonresonance_diagnostic(identity3, base_point, 15)
    assert all(tr.side == "neither" for tr in table.triples.values())
    assert all(tr.rate_fwd <= 1e-12 for tr in table.triples.values())


def test_nonresonance_skew_shear(skew002, base_point):
    # E-exponents {ln lambda_s, 0}, F-exponent ln lambda_u: all sums lie below,
    # so the (1,2,1) ratio decays forward
    table = nonresonance_diagnostic(skew002, base_point, 25)
    assert table.triples[(1, 2, 1)].side == "forward"
    assert table.extreme_implication_ok


def test_exclusivity_on_sampled_points(cat3, perturbed001, skew002):
    for model, seed in [(cat3, 3), (perturbed001, 4), (skew002, 5)]:
        for x in model.space.random_points(20, seed=seed):
            assert pointwise_ratios(model, x).exclusive, model.name


def test_domination_report_assembles(cat3, base_point):
    rep = domination_report(cat3, base_point, 15)
    assert rep.second_order.verdict == "forward"
    assert rep.exclusivity_ok
    assert set(rep.sequences) == {("E", 1), ("E", -1), ("F", 1), ("F", -1)}
    assert rep.sequences[("E", 1)].shape == (15, 2)
