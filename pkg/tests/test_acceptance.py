"""One test per exit criterion; each prints a PASS/FAIL line (run with -s to see them)."""
import json

import pytest

from atomphase import acceptance

_cache = {}


def result(check):
    if check not in _cache:
        _cache[check] = check()
    return _cache[check]


@pytest.mark.parametrize("check", acceptance.ALL, ids=lambda c: c.__name__)
def test_criterion(check):
    r = result(check)
    print("\n" + r.line())
    assert r.passed, json.dumps(r.to_json(), indent=1, default=str)


def test_summary_is_deterministic():
    # byte-identical summaries across two runs of the cheap criteria
    cheap = (acceptance.spin_map, acceptance.algebra_suite, acceptance.phase_eigenbasis,
             acceptance.witness, acceptance.ghz, acceptance.biphoton)
    first = json.dumps([c().to_json() for c in cheap], sort_keys=True)
    second = json.dumps([c().to_json() for c in cheap], sort_keys=True)
    assert first == second


def test_corner_perturbation_is_detected():
    assert not acceptance.phase_eigenbasis(1e-6).passed
