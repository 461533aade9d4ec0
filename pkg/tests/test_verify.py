import json
import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import bundled
from ctht import verify
from ctht.errors import AccuracyError, ConfigurationError, DomainError
from ctht.families import BUMP_FAMILY, zero_function
from ctht.hypergroup import JacobiParams
from ctht.verify import (
    FunctionAnalysis,
    InequalityReport,
    ScenarioConfig,
    g_weight,
    hardy_littlewood_check,
    integrability_threshold,
    lemma2_check,
    low_frequency_check,
    riemann_lebesgue_check,
    run_scenario,
    synthetic_spectrum,
    theorem_integrability_check,
    weighted_estimate_check,
)

HALF = JacobiParams(0.5, 0.5)
DELTA_CHECKS = [lemma2_check, riemann_lebesgue_check, low_frequency_check]


def cfg(p=2.0, **kw):
    return ScenarioConfig("t", HALF, p=p, **kw)


@pytest.mark.parametrize("x,want", [(0.5, 0.125), (2.0, 8.0), (1.0, 1.0)])
def test_g_weight_examples(x, want):
    assert g_weight(HALF, x, 1.0) == want


def test_g_weight_exponent_above_threshold():
    p = JacobiParams(2.0, 0.5)
    assert g_weight(p, 3.0) == pytest.approx(3.0 ** 6)
    with pytest.raises(DomainError):
        g_weight(HALF, 0.0)


@pytest.mark.parametrize("check", DELTA_CHECKS)
@pytest.mark.parametrize("p", [1.0, 2.0])
def test_zero_function_passes(check, p):
    r = check(cfg(p), zero_function(), 0.1)
    assert (r.lhs, r.rhs, r.passed) == (0.0, 0.0, True)


def test_zero_function_passes_p_dependent_checks():
    c = cfg(1.5)
    assert hardy_littlewood_check(c, zero_function()).passed
    r = weighted_estimate_check(c, zero_function(), 0.1)
    assert r.passed and r.lhs == r.rhs == 0.0


def test_modulus_below_floor_is_accuracy_error():
    with pytest.raises(AccuracyError):
        lemma2_check(cfg(), bundled("gauss_wide"), 1e-7)


@pytest.fixture(scope="module")
def scaled_pair():
    f = bundled("cosine_wide")
    return f, f.scaled(3.0)


@pytest.mark.parametrize("check", DELTA_CHECKS)
@pytest.mark.parametrize("p", [1.0, 2.0])
def test_ratio_scale_invariant(scaled_pair, check, p):
    f, g = scaled_pair
    a, b = check(cfg(p), f, 0.1), check(cfg(p), g, 0.1)
    assert b.ratio == pytest.approx(a.ratio, rel=1e-9)


def test_ratio_scale_invariant_p_dependent(scaled_pair):
    f, g = scaled_pair
    c = cfg(1.5)
    assert hardy_littlewood_check(c, g).ratio == pytest.approx(hardy_littlewood_check(c, f).ratio, rel=1e-9)
    assert (weighted_estimate_check(c, g, 0.1).ratio
            == pytest.approx(weighted_estimate_check(c, f, 0.1).ratio, rel=1e-9))


@pytest.mark.parametrize("name", BUMP_FAMILY)
def test_hardy_littlewood_at_two_is_plancherel(name):
    r = hardy_littlewood_check(cfg(2.0), bundled(name))
    assert r.ratio == pytest.approx(1.0, abs=1e-6)


def test_hardy_littlewood_needs_p_above_one():
    with pytest.raises(ConfigurationError):
        hardy_littlewood_check(ScenarioConfig("t", HALF, p=1.0, checks=("lemma2",)), bundled("gauss_wide"))


def test_eq12_brackets_unweighted_integral():
    r = weighted_estimate_check(cfg(1.5), bundled("gauss_wide"), 0.1)
    m = r.metadata
    assert m["g_factor_min"] * m["unweighted"] <= r.lhs * (1 + 1e-12)
    assert r.lhs <= m["g_factor_max"] * m["unweighted"] * (1 + 1e-12)


def test_shared_context_matches_standalone():
    c = cfg(2.0)
    f = bundled("gauss_narrow")
    ctx = FunctionAnalysis(c, f)
    for d in c.delta_grid:
        assert lemma2_check(c, f, d, ctx).ratio == pytest.approx(lemma2_check(c, f, d).ratio, rel=1e-10)


# -- theorem-level integrability ---------------------------------------------------------

def test_threshold_formula():
    # p = 2, alpha = 1/2, gamma = 2: 2 * 1.5 * 2 / (4 + 3) = 6/7
    assert integrability_threshold(0.5, 2.0, 2.0) == pytest.approx(6 / 7)
    assert integrability_threshold(0.5, 2.0, 1.0) == pytest.approx(1.5)


@pytest.mark.parametrize("p", [2.0, 1.5])
def test_synthetic_spectrum_verdicts(p):
    c = cfg(p)
    gamma = 2.0
    s0 = integrability_threshold(HALF.alpha, gamma, p)
    spec = synthetic_spectrum(HALF.alpha, gamma, p)
    below = theorem_integrability_check(c, None, 0.5 * s0, gamma, spectrum_fn=spec)
    above = theorem_integrability_check(c, None, min(2 * s0, c.p_conj), gamma, spectrum_fn=spec)
    assert below.metadata["verdict"] == "divergent" and not below.metadata["predicted_convergent"]
    assert above.metadata["verdict"] == "convergent" and above.metadata["predicted_convergent"]
    assert below.passed and above.passed


def test_synthetic_needs_gamma():
    with pytest.raises(ConfigurationError):
        theorem_integrability_check(cfg(), None, 1.0, spectrum_fn=lambda lam: lam)


def test_bump_converges_at_conjugate_exponent():
    r = theorem_integrability_check(cfg(2.0), bundled("gauss_wide"), 2.0, gamma_hat=2.0)
    assert r.metadata["verdict"] == "convergent"
    inc = r.metadata["increments"]
    assert len(inc) == 3 and len(r.metadata["partial_integrals"]) == 3


def test_partial_integral_verdict_rules():
    assert verify.partial_integral_verdict([1.0, 0.4, 0.1], [0, 0, 0]) == "convergent"
    assert verify.partial_integral_verdict([1.0, 1.0, 2.0], [0, 0, 0]) == "divergent"
    assert verify.partial_integral_verdict([1.0, 0.9, 0.1], [0, 0, 0]) == "inconclusive"
    assert verify.partial_integral_verdict([1e-20, 2e-20, 3e-20], [1e-20] * 3) == "convergent"


# -- reports, configuration, runner --------------------------------------------------------

def test_report_round_trip():
    r = InequalityReport("a/b", 1.5, math.inf, 0.0, math.nan, False, {"x": [1, 2], "y": math.inf})
    d = json.loads(json.dumps(r.to_dict(), allow_nan=False))
    back = InequalityReport.from_dict(d)
    assert back.scenario_id == r.scenario_id and back.lhs == 1.5 and back.rhs == math.inf
    assert math.isnan(back.fitted_constant) and back.passed is False
    assert d["pass"] is False and back.to_dict() == d


def test_config_round_trip():
    c = cfg(1.5, functions=("gauss_wide", {"name": "step", "scale": 2.0}), delta_grid=(0.3, 0.1))
    back = ScenarioConfig.from_dict(json.loads(json.dumps(c.to_dict())))
    assert back.to_dict() == c.to_dict()
    assert back.delta_grid == (0.1, 0.3)


@pytest.mark.parametrize("kw", [dict(checks=("nonsense",)), dict(p=2.5), dict(p=1.0, checks=("hardy-littlewood",)),
                                dict(delta_grid=(0.0,)), dict(ratio_spread=0.5)])
def test_config_errors(kw):
    with pytest.raises(ConfigurationError):
        cfg(**kw)


def test_config_errors_from_dict(tmp_path):
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_dict({"params": {"alpha": 1, "beta": 0}})
    with pytest.raises(ConfigurationError):
        verify.load_scenarios(str(tmp_path / "missing.json"))
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigurationError):
        verify.load_scenarios(str(tmp_path / "bad.json"))


def test_sub_check_error_names_the_check():
    c = ScenarioConfig("t", HALF, p=2.0, functions=("no_such_fn",), checks=("lemma2",))
    with pytest.raises(ConfigurationError):
        run_scenario(c)
    c = ScenarioConfig("t", HALF, p=2.0, functions=("gauss_wide",), checks=("lemma2",), delta_grid=(1e-7,))
    with pytest.raises(AccuracyError, match="lemma2"):
        run_scenario(c)


def test_empty_family_gives_no_reports():
    assert run_scenario(cfg(checks=("lemma2", "riemann-lebesgue"))) == []


def test_runner_orders_and_finalizes(tmp_path):
    c = ScenarioConfig("mini", HALF, p=2.0, functions=("gauss_wide", "cosine_wide"),
                       checks=("character-bound", "lemma2", "hardy-littlewood"), output_dir=str(tmp_path))
    reps = run_scenario(c)
    ids = [r.scenario_id for r in reps]
    assert ids[0] == "mini/character-bound"
    assert ids[1:7] == [f"mini/lemma2/{fn}/delta={d:g}" for fn in ("gauss_wide", "cosine_wide")
                        for d in (0.03, 0.1, 0.3)]
    lemma = reps[1:7]
    assert all(r.fitted_constant == max(x.ratio for x in lemma) for r in lemma)
    assert all(r.metadata["delta_spread"] <= 10 for r in lemma)
    assert all(math.isfinite(r.ratio) and r.ratio >= 0 for r in reps)

    doc, back = verify.read_report_file(tmp_path / "mini.json")
    assert doc["scenario_id"] == "mini" and [r.to_dict() for r in back] == [r.to_dict() for r in reps]
    csv = (tmp_path / "mini__lemma2__gauss_wide.csv").read_text().splitlines()
    assert csv[0] == "delta,lhs,rhs" and len(csv) == 4
    first = (tmp_path / "mini.json").read_bytes()
    run_scenario(c)
    assert (tmp_path / "mini.json").read_bytes() == first


def test_spread_failure_marks_reports():
    c = ScenarioConfig("s", HALF, p=2.0, functions=("gauss_wide",), checks=("lemma2",), ratio_spread=1.0)
    reps = run_scenario(c, write=False)
    assert not any(r.passed for r in reps)
    assert all(r.metadata["spread_ok"] is False for r in reps)


def test_bundled_scenarios_load():
    cfgs = verify.load_scenarios("all-lemmas")
    assert [c.scenario_id for c in cfgs] == ["p2", "p1", "p1.5"]
    c = replace(cfgs[0], output_dir="x")
    assert c.output_dir == "x"
