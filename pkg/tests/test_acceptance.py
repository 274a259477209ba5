"""Full verification suite at the pinned tolerances, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
pass/fail lines (``gwolf verify`` prints the same report from the CLI).
"""

import json

import pytest

from gwolf.acceptance import DEFAULT_SEED, DEFAULT_TRIALS, run_acceptance

CRITERIA = [
    "leader_step_ks",      # step density vs sampled steps, four setups
    "cdf_closed_form",     # antiderivative vs region reference and quadrature
    "update_density",      # convolution law: mass/symmetry/monotone/KS
    "support_boxes",       # exact box sizes and strict containment
    "variance_dynamics",   # recursion vs MC variance, attractor tracking
    "gap_trend",           # horizon gap strictly decreasing, bounded
    "order1_stability",    # mean pinned to sum(p)/3 from t = 2 on
    "order2_stability",    # variance collapse at the horizon
    "moment_consistency",  # generic step vs closed form; sigma^4 vs MC
    "optimizer_sanity",    # sphere run: monotone, 100x, schedule-independent
]


@pytest.fixture(scope="module")
def report():
    return run_acceptance(seed=DEFAULT_SEED, trials=DEFAULT_TRIALS, workers=1)


@pytest.mark.parametrize("name", CRITERIA)
def test_criterion(report, name):
    check = next(c for c in report.checks if c["name"] == name)
    status = "PASS" if check["passed"] else "FAIL"
    limit = f" (limit {check['limit']:g}s)" if check["limit"] else ""
    print(f"{status}  {name:<20s} {check['elapsed']:7.2f}s{limit}")
    assert check["passed"], json.dumps(check, indent=2)


def test_all_criteria_present(report):
    assert [c["name"] for c in report.checks] == CRITERIA
    assert report.all_passed
