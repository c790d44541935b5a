from fractions import Fraction

import pytest

import kassign.verify as verify
from kassign.errors import DomainError
from kassign.formulas import FORMS, f_main
from kassign.verify import (
    basic_identity_sides,
    check_all_ones_modular,
    check_basic_identity,
    check_exact_vs_formula,
    check_form_equivalence,
    check_limit_identities,
    check_monotonicity_and_derivative,
    limit_expression,
    limit_right_side,
    summarize,
)

F = Fraction


def test_forms_rational_2_3_3():
    rep = check_form_equivalence(2, 3, 3, trials=100)
    assert rep["passed"] and rep["evaluations"] == 100
    assert rep["status"] == "proved"


def test_forms_modular_3_4_4():
    rep = check_form_equivalence(3, 4, 4, trials=1000, mode="modular")
    assert rep["passed"]
    assert rep["false_pass_log10_bound"] < -1000


def test_forms_1_1_1():
    for fn in FORMS.values():
        assert fn(1, [F(3, 2)], [F(5)]) == F(2, 15)
    assert check_form_equivalence(1, 1, 1, trials=5)["passed"]


def test_small_prime_resamples():
    rep = check_form_equivalence(2, 3, 3, trials=30, mode="modular", prime=13)
    assert rep["passed"]
    assert rep["resampled"] > 0


def test_mismatch_is_reported_with_witness(monkeypatch):
    broken = dict(FORMS)
    broken["urn"] = lambda k, r, c: f_main(k, r, c) + 1
    monkeypatch.setattr(verify, "FORMS", broken)
    rep = check_form_equivalence(2, 2, 3, trials=3)
    assert not rep["passed"]
    assert len(rep["mismatches"]) == 3
    w = rep["mismatches"][0]
    assert w["form"] == "urn" and len(w["r"]) == 2 and len(w["c"]) == 3
    assert summarize([rep])["proved_failures"] == 1


def test_basic_identity_examples():
    lhs, rhs = basic_identity_sides([F(1), F(1)], 1, 1)
    assert lhs == rhs == 1
    assert check_basic_identity(3, 1, 1, trials=10)["passed"]


def test_basic_identity_grid():
    for n in range(2, 6):
        for H, L in verify.admissible_basic(n):
            assert check_basic_identity(n, H, L, trials=3)["passed"], (n, H, L)


def test_basic_identity_ranges():
    with pytest.raises(DomainError):
        check_basic_identity(3, 1, 2)
    with pytest.raises(DomainError):
        check_basic_identity(3, 3, 1)


def test_limit_branches():
    first = check_limit_identities(2, 4, 3, 2, trials=20)  # l = m - k
    assert first["params"]["branch"] == "first" and first["passed"]
    second = check_limit_identities(3, 3, 4, 1, trials=20)  # k = m
    assert second["params"]["branch"] == "second" and second["passed"]
    assert "not machine-checkable" in second["note"]


def test_limit_boundary_consistency():
    # at m - l = k the two right-hand sides coincide: the K-sum collapses to K = {}
    r, c = [F(2), F(1, 3), F(5)], [F(1), F(4), F(2, 7)]
    k, l = 2, 1
    assert limit_right_side(k, r, c, l) == f_main(k, r[1:], c)
    zero = [F(0)] + r[1:]
    assert limit_expression(k, zero, c, l) == f_main(k, r[1:], c)


def test_limit_modular_and_ranges():
    assert check_limit_identities(3, 4, 4, 2, trials=10, mode="modular")["passed"]
    with pytest.raises(DomainError):
        check_limit_identities(2, 3, 3, 3)


def test_monotonicity_and_derivative():
    rep = check_monotonicity_and_derivative(2, 3, 3, trials=10)
    assert rep["passed"] and rep["bumps"] == 10
    assert f_main(2, [2, 1], [1, 1]) < f_main(2, [1, 1], [1, 1]) == F(5, 4)


def test_exact_vs_formula_proved_regime():
    for k in (2, 3):
        rep = check_exact_vs_formula(k, trials=5, mode="rational")
        assert rep["passed"] and rep["status"] == "proved"
    rep = check_exact_vs_formula(3, trials=5)
    assert rep["rational_spot_check"] and rep["passed"]


def test_exact_k4_is_conjectural():
    rep = check_exact_vs_formula(4, trials=3)
    assert rep["status"] == "conjectural" and rep["passed"]
    assert rep["false_pass_log10_bound"] < -30
    assert "degree_bound" in rep


def test_conjectural_mismatch_keeps_label(monkeypatch):
    monkeypatch.setattr(verify, "expected_min_exact", lambda A, k: A[0][0])
    rep = check_exact_vs_formula(4, trials=2)
    assert not rep["passed"] and rep["status"] == "conjectural"
    assert {"r", "c", "exact", "formula"} <= set(rep["mismatches"][0])
    s = summarize([rep])
    assert s["conjectural_mismatches"] == 1 and s["proved_failures"] == 0


def test_all_ones_modular():
    rep = check_all_ones_modular(4, trials=2)
    assert rep["passed"]


def test_unknown_mode():
    with pytest.raises(DomainError):
        check_form_equivalence(1, 1, 1, trials=1, mode="float")
