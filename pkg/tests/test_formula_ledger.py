"""Corrected closed forms agree with brute-force cubature; the rejected
variant coefficients must fail the identical check, guarding against a
silent fix of the wrong side."""

import pytest

from ledger_checks import ALL_CHECKS


@pytest.mark.parametrize("name", sorted(ALL_CHECKS))
def test_corrected_formula_matches_cubature(name):
    for corrected_ok, _ in ALL_CHECKS[name]():
        assert corrected_ok


@pytest.mark.parametrize("name", sorted(ALL_CHECKS))
def test_variant_fails_somewhere(name):
    results = ALL_CHECKS[name]()
    assert any(not variant_ok for _, variant_ok in results)
