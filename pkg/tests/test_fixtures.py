from fractions import Fraction as F

import pytest

from quasilocal.fixtures import expected_entries, load_fixtures, symbols_for, verify_fixtures
from quasilocal.metric import closed_form_theta

NAMES = sorted(load_fixtures())


def test_inventory():
    fx = load_fixtures()
    assert {f"theta_{r}" for r in range(1, 8)} <= set(fx)
    for name, item in fx.items():
        rows = [r.split() for r in item["rows"]]
        assert len(rows) % 2 == 1 and all(len(r) == len(rows) for r in rows), name


@pytest.mark.parametrize("g", [F(1, 3), F(1, 2), F(9, 10), 0.5, F(-1, 4)])
def test_all_fixtures_replay(g):
    checks = verify_fixtures(g)
    assert [c.name for c in checks] == NAMES
    bad = [(c.name, c.mismatches[:3]) for c in checks if not c.ok]
    assert not bad


def test_erratum_is_confined_to_listed_entries():
    (check,) = verify_fixtures(F(1, 2), names={"omega_inverse"})
    assert check.ok
    assert sorted(ij for ij, _, _ in check.mismatches) == [(-2, 0), (2, 0)]
    assert "satisfies" in check.note


def test_detects_a_wrong_entry():
    fx = load_fixtures()["theta_3"]
    want = expected_entries(fx, F(1, 2))
    M = closed_form_theta(3, F(1, 3), 10).matrix
    assert any(M[ij] != v for ij, v in want.items())


def test_central_symbols():
    g = F(1, 2)
    sym = symbols_for(load_fixtures()["theta_5"], g)
    assert sym["z"] == (1 + g) * (1 - 2 * g * g) ** 2 / (1 - g)
    assert symbols_for(load_fixtures()["theta_6"], g)["e"] == (1 + g) * (1 - 2 * g * g) ** 2
