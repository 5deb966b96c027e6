import json
import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from dunklriesz.hermite import build_basis
from dunklriesz.reflection import root_system
from dunklriesz.verify import (
    ALL_CHECKS,
    VerifyConfig,
    check_eigen,
    check_heat,
    check_hormander,
    check_integral_representation,
    check_kernel_decay,
    check_lp_empirical,
    check_mehler,
    check_riesz_l2,
    run_checks,
)

FAST = VerifyConfig(
    fit_t_points=6,
    fit_t_large_points=4,
    fit_grid_points=7,
    fit_ridge_points=9,
    horm_separations=(0.005, 0.01, 0.02),
    horm_mc_samples=1500,
    decay_separations=6,
    io_degree=3000,
    lp_samples=10,
    norm_vectors=8,
)


def test_check_eigen_pass(z2_half_basis8):
    r = check_eigen(z2_half_basis8)
    assert r.status == "pass"
    assert r.residuals["max_residual"] == 0.0


def test_check_eigen_float_mode():
    rs = root_system("i2(5)", multiplicity=1.0)
    r = check_eigen(build_basis(rs, 4))
    assert r.status == "pass"
    assert 0 <= r.residuals["max_residual"] < 1e-10


def test_check_mehler_skip_non_z2(a2_one):
    r = check_mehler(build_basis(a2_one, 2), FAST)
    assert r.status == "skip"


def test_check_mehler_n12_fails_at_half(z2_half):
    """At the (N=12, r=0.5) corner the truncation tail is ~1e-4; the strict
    1e-6 tolerance cannot hold.  See the acceptance suite for the resolution."""
    r = check_mehler(build_basis(z2_half, 12), FAST)
    assert r.status == "fail"
    assert 1e-5 < r.residuals["max_rel_err"] < 1e-3


def test_check_mehler_n24_passes(z2_half):
    r = check_mehler(build_basis(z2_half, 24), FAST)
    assert r.status == "pass"


def test_check_heat(z2_half_basis8):
    r = check_heat(z2_half_basis8, FAST)
    assert r.status == "pass"
    assert r.residuals["printed_constant_min_rel_err"] > 0.9  # 2^{1} - 1


def test_check_riesz_l2(z2_half_basis8):
    r = check_riesz_l2(z2_half_basis8, FAST)
    assert r.status == "pass"
    assert r.constants["max_norm"] <= math.sqrt(2) + 1e-8


def test_check_kernel_decay(z2_half_basis8):
    r = check_kernel_decay(z2_half_basis8, FAST)
    assert r.status == "pass"
    assert r.residuals["floor_refused"] is True


def test_check_integral_representation(z2_half_basis8):
    r = check_integral_representation(z2_half_basis8, FAST)
    assert r.status == "pass"
    assert r.residuals["max_rel_err"] < 1e-3
    # the N=8 truncation is nowhere near converged; recorded for reference
    assert r.residuals["rel_err_at_basis_truncation"] > 0.1


def test_check_lp(z2_half_basis8):
    r = check_lp_empirical(z2_half_basis8, FAST)
    assert r.status == "pass"
    assert r.constants["p=2.0_max"] <= math.sqrt(2) + 0.05
    assert "SOFT EVIDENCE" in r.notes


def test_check_hormander_fast(z2_half_basis8):
    r = check_hormander(z2_half_basis8, FAST)
    assert r.status == "pass"
    assert r.constants["slope_direct"] <= FAST.horm_slope_tol
    assert r.residuals["mc_se_ok"] and r.residuals["mc_consistent"]


def test_run_checks_report_structure(z2_half_basis8):
    rep = run_checks(z2_half_basis8, ["eigen", "heat"], FAST)
    assert [c.name for c in rep.checks] == ["eigen", "heat"]
    data = json.loads(rep.to_json())
    assert {c["name"] for c in data["checks"]} == {"eigen", "heat"}
    for c in data["checks"]:
        for key in ("name", "status", "config", "constants", "residuals",
                    "samples", "seed", "runtime_ms"):
            assert key in c
    csv_text = rep.constants_csv()
    assert csv_text.splitlines()[0] == "check,constant,value"


def test_unknown_check_rejected(z2_half_basis8):
    with pytest.raises(ValueError):
        run_checks(z2_half_basis8, ["nope"], FAST)


def test_report_deterministic(z2_half_basis8):
    """Identical config + seed implies identical canonical payload
    (wall times excluded)."""
    names = ["eigen", "heat", "lp_empirical"]
    rep1 = run_checks(z2_half_basis8, names, FAST)
    rep2 = run_checks(z2_half_basis8, names, FAST)
    p1 = json.dumps(rep1.canonical_payload(), sort_keys=True)
    p2 = json.dumps(rep2.canonical_payload(), sort_keys=True)
    assert p1 == p2


def test_seed_changes_sampled_checks(z2_half_basis8):
    r1 = check_lp_empirical(z2_half_basis8, FAST)
    r2 = check_lp_empirical(z2_half_basis8, replace(FAST, seed=FAST.seed + 1))
    assert r1.constants["p=2.0_max"] != r2.constants["p=2.0_max"]


def test_all_checks_registered():
    assert set(ALL_CHECKS) == {
        "eigen", "mehler", "heat", "lemma_bounds", "kernel_decay",
        "hormander", "riesz_l2", "integral_representation", "lp_empirical",
    }
