"""Random-point verification of the closed-form identities.

Each ``check_*`` function evaluates both sides of an identity at random
points, either in exact rationals (``mode="rational"``) or modulo a large
prime (``mode="modular"``), and returns a plain-dict report.  Reports carry
a ``status`` label: ``"proved"`` for identities with a known proof (a
mismatch there is an implementation bug) and ``"conjectural"`` for the
exact-engine-versus-formula comparison at k = 4 (a mismatch there would be
a counterexample).  Every mismatch is recorded with its witness point.

Random rationals have numerator and denominator uniform in [1, 1000];
modular points are uniform nonzero residues.  A modular trial of a false
identity of total degree D passes with probability at most D/p, so t
independent trials bound the false-pass probability by (D/p)^t; reports
give ``log10`` of that bound.
"""

from __future__ import annotations

import math
import random
from itertools import combinations

from .arith import DEFAULT_PRIME, Dual, ModScalar, binomial, format_rational
from .errors import DomainError, UnluckyPointError
from .expectation import MAX_K, expected_min_exact, plan, rank_one_matrix
from .formulas import (
    FORMS,
    contribution,
    derivative_r1_rhs,
    f_component,
    f_main,
    pr_urn_set,
)

MODES = ("rational", "modular")
MAX_RETRIES = 20
RATIONAL_RANGE = 1000


def _rng(seed: int, trial: int) -> random.Random:
    # per-trial stream, independent of how many trials run or in what order
    return random.Random(seed * 1_000_003 + trial)


def random_rational(rng: random.Random):
    from fractions import Fraction
    return Fraction(rng.randint(1, RATIONAL_RANGE), rng.randint(1, RATIONAL_RANGE))


def random_point(rng: random.Random, size: int, mode: str, prime: int = DEFAULT_PRIME) -> list:
    if mode == "rational":
        return [random_rational(rng) for _ in range(size)]
    if mode == "modular":
        return [ModScalar(rng.randint(1, prime - 1), prime) for _ in range(size)]
    raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")


def _show(x):
    if isinstance(x, ModScalar):
        return str(x.residue)
    if isinstance(x, Dual):
        return {"value": _show(x.value), "deriv": _show(x.deriv)}
    return format_rational(x)


def _show_vec(v) -> list:
    return [_show(x) for x in v]


def _new_report(check: str, status: str, mode: str, params: dict, trials: int) -> dict:
    if status not in ("proved", "conjectural"):
        raise ValueError(status)
    return {
        "check": check,
        "status": status,
        "mode": mode,
        "params": params,
        "trials": trials,
        "evaluations": 0,
        "resampled": 0,
        "mismatches": [],
    }


def _finish(report: dict, degree: int | None = None, prime: int = DEFAULT_PRIME) -> dict:
    report["passed"] = not report["mismatches"]
    if report["mode"] == "modular" and degree is not None:
        t = report["trials"]
        report["degree_bound"] = degree
        report["prime"] = prime
        report["false_pass_log10_bound"] = t * (math.log10(degree) - math.log10(prime))
    return report


def _run_trials(report, trials, seed, body):
    """Call ``body(rng)`` for each trial, resampling points that hit a zero denominator."""
    for trial in range(trials):
        rng = _rng(seed, trial)
        for _ in range(MAX_RETRIES):
            try:
                body(rng)
                break
            except (UnluckyPointError, ZeroDivisionError):
                report["resampled"] += 1
        else:
            raise UnluckyPointError(f"trial {trial}: no usable point after {MAX_RETRIES} draws")
        report["evaluations"] += 1


def _form_degree(m: int, n: int) -> int:
    # each form clears to a polynomial identity of degree at most the
    # number of distinct linear denominators on both sides
    return 4 * (2 ** m + 2 ** n)


# ---------------------------------------------------------------------------
# form equivalence
# ---------------------------------------------------------------------------

def contribution_sum(k: int, r, c, form: str = "permutations"):
    m, n = len(r), len(c)
    total = 0
    for I in combinations(range(m), k - 1):
        for J in combinations(range(n), k - 1):
            total = total + contribution(k, r, c, I, J, form)
    return total


def check_form_equivalence(k: int, m: int, n: int, trials: int = 100, mode: str = "rational",
                           seed: int = 0, prime: int = DEFAULT_PRIME) -> dict:
    """All F-forms and both contribution sums agree with ``f_main``."""
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)}")
    report = _new_report("forms", "proved", mode, {"k": k, "m": m, "n": n}, trials)

    def body(rng):
        r = random_point(rng, m, mode, prime)
        c = random_point(rng, n, mode, prime)
        ref = f_main(k, r, c)
        values = {name: fn(k, r, c) for name, fn in FORMS.items() if name != "main"}
        values["contribution_sum"] = contribution_sum(k, r, c)
        values["contribution_sum_nested"] = contribution_sum(k, r, c, "nested")
        for name, v in values.items():
            if v != ref:
                report["mismatches"].append({
                    "form": name, "r": _show_vec(r), "c": _show_vec(c),
                    "main": _show(ref), "other": _show(v),
                })

    _run_trials(report, trials, seed, body)
    return _finish(report, _form_degree(m, n), prime)


# ---------------------------------------------------------------------------
# binomial-coefficient identity behind the limit identities
# ---------------------------------------------------------------------------

def basic_identity_sides(c, H: int, L: int):
    """Both sides of the coefficient identity for column weights ``c``."""
    n = len(c)
    if not 1 <= L <= H <= n - 1:
        raise DomainError(f"need 1 <= L <= H <= n-1, got L={L}, H={H}, n={n}")
    total = sum(c, start=0)
    lhs = rhs = 0
    for size in range(H + 1):
        coef = binomial(L - n - 1, H - size)
        if coef == 0:
            continue
        for J in combinations(range(n), size):
            term = coef / (total - sum((c[j] for j in J), start=0))
            lhs = lhs + term
            if size >= L:
                weight = sum((pr_urn_set(c, K) for K in combinations(J, L)), start=0)
                rhs = rhs + weight * term
    return lhs, rhs


def admissible_basic(n: int):
    return [(H, L) for H in range(1, n) for L in range(1, H + 1)]


def check_basic_identity(n: int, H: int, L: int, trials: int = 20, mode: str = "rational",
                         seed: int = 0, prime: int = DEFAULT_PRIME) -> dict:
    if not 1 <= L <= H <= n - 1:
        raise DomainError(f"need 1 <= L <= H <= n-1, got L={L}, H={H}, n={n}")
    report = _new_report("basic", "proved", mode, {"n": n, "H": H, "L": L}, trials)

    def body(rng):
        c = random_point(rng, n, mode, prime)
        lhs, rhs = basic_identity_sides(c, H, L)
        if lhs != rhs:
            report["mismatches"].append({"c": _show_vec(c), "lhs": _show(lhs), "rhs": _show(rhs)})

    _run_trials(report, trials, seed, body)
    return _finish(report, 4 * 2 ** n, prime)


# ---------------------------------------------------------------------------
# limits as leading row weights vanish
# ---------------------------------------------------------------------------

def limit_expression(k: int, r, c, l: int):
    """Binomial sum over I not containing all of rows l..m-1, J any subset.

    Every denominator stays nonzero when ``r[:l]`` are set to zero, so this
    can be evaluated directly at the limit point.
    """
    m, n = len(r), len(c)
    tail = frozenset(range(l, m))
    R, C = sum(r, start=0), sum(c, start=0)
    total = 0
    for a in range(min(k, m + 1)):
        for I in combinations(range(m), a):
            if tail <= set(I):
                continue
            rs = R - sum((r[i] for i in I), start=0)
            for b in range(min(k - a, n)):
                coef = binomial(k - 1 - m - n, k - 1 - a - b)
                for J in combinations(range(n), b):
                    total = total + coef / (rs * (C - sum((c[j] for j in J), start=0)))
    return total


def limit_right_side(k: int, r, c, l: int):
    """Value the limit should take, by branch."""
    m, n = len(r), len(c)
    rest = list(r[l:])
    if k <= m - l:
        return f_main(k, rest, c)
    size = k + l - m
    total = 0
    for K in combinations(range(n), size):
        c_rest = [c[j] for j in range(n) if j not in K]
        total = total + pr_urn_set(c, K) * f_main(m - l, rest, c_rest)
    return total


def check_limit_identities(k: int, m: int, n: int, l: int, trials: int = 50,
                           mode: str = "rational", seed: int = 0,
                           prime: int = DEFAULT_PRIME) -> dict:
    """Limit identities as r_0..r_{l-1} -> 0, checked algebraically.

    Two checks per point: the substituted expression at positive weights
    equals F(k) (minus the F over the vanishing rows when k > m - l), and
    at zero weights it equals the predicted limit.
    """
    if not 1 <= l < m:
        raise DomainError(f"need 1 <= l < m, got l={l}, m={m}")
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)}")
    branch = "first" if k <= m - l else "second"
    report = _new_report("limits", "proved", mode,
                         {"k": k, "m": m, "n": n, "l": l, "branch": branch}, trials)
    report["note"] = ("the probabilistic limit of the expectation itself is not "
                      "machine-checkable; only its algebraic counterpart is checked")

    def body(rng):
        r = random_point(rng, m, mode, prime)
        c = random_point(rng, n, mode, prime)
        before = f_main(k, r, c)
        if branch == "second":
            before = before - f_main(k + l - m, r[:l], c)
        expr = limit_expression(k, r, c, l)
        if expr != before:
            report["mismatches"].append({"stage": "substitution", "r": _show_vec(r),
                                         "c": _show_vec(c), "lhs": _show(before),
                                         "rhs": _show(expr)})
        zero = 0 * r[0]
        r0 = [zero] * l + list(r[l:])
        at_zero = limit_expression(k, r0, c, l)
        limit = limit_right_side(k, r, c, l)
        if at_zero != limit:
            report["mismatches"].append({"stage": "limit", "r": _show_vec(r0),
                                         "c": _show_vec(c), "lhs": _show(at_zero),
                                         "rhs": _show(limit)})

    _run_trials(report, trials, seed, body)
    return _finish(report, _form_degree(m, n), prime)


def valid_limit_params(max_m: int = 4, max_n: int = 4):
    for m in range(2, max_m + 1):
        for n in range(1, max_n + 1):
            for k in range(1, min(m, n) + 1):
                for l in range(1, m):
                    yield k, m, n, l


# ---------------------------------------------------------------------------
# monotonicity and the derivative in r_0
# ---------------------------------------------------------------------------

def check_monotonicity_and_derivative(k: int, m: int, n: int, trials: int = 50,
                                      seed: int = 0, bumps: int | None = None) -> dict:
    """F decreases in each weight; its r_0 derivative matches the f.g expansion.

    Three parts per trial, all in exact rationals: a coordinate bump
    strictly lowers F; ``-dF/dr_0`` from dual numbers equals
    :func:`derivative_r1_rhs`; the components f(l, r, I), f(l, c, J) are
    positive for l <= 3.
    """
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)}")
    report = _new_report("mono", "proved", "rational", {"k": k, "m": m, "n": n}, trials)
    report["bumps"] = 0
    bumps = trials if bumps is None else bumps

    def derivative(rng):
        r = random_point(rng, m, "rational")
        c = random_point(rng, n, "rational")
        rd = [Dual(r[0], 1)] + [Dual(x, 0) for x in r[1:]]
        F = f_main(k, rd, c)
        rhs = derivative_r1_rhs(k, r, c)
        if -F.deriv != rhs or F.value != f_main(k, r, c):
            report["mismatches"].append({"part": "derivative", "r": _show_vec(r),
                                         "c": _show_vec(c), "dual": _show(-F.deriv),
                                         "rhs": _show(rhs)})
        for ell in (1, 2, 3):
            for w, label in ((r, "r"), (c, "c")):
                for size in range(len(w)):
                    for S in combinations(range(len(w)), size):
                        v = f_component(ell, w, S)
                        if not v > 0:
                            report["mismatches"].append({
                                "part": "positivity", "weights": label, "ell": ell,
                                "subset": [i + 1 for i in S], "point": _show_vec(w), "value": _show(v)})

    _run_trials(report, trials, seed, derivative)

    for b in range(bumps):
        rng = _rng(seed + 1, b)
        r = random_point(rng, m, "rational")
        c = random_point(rng, n, "rational")
        side = rng.choice("rc")
        w = r if side == "r" else c
        idx = rng.randrange(len(w))
        bumped = list(w)
        bumped[idx] = bumped[idx] + random_rational(rng)
        before = f_main(k, r, c)
        after = f_main(k, bumped, c) if side == "r" else f_main(k, r, bumped)
        report["bumps"] += 1
        if not after < before:
            report["mismatches"].append({"part": "monotonicity", "r": _show_vec(r),
                                         "c": _show_vec(c), "side": side, "index": idx + 1,
                                         "before": _show(before), "after": _show(after)})
    return _finish(report)


# ---------------------------------------------------------------------------
# exact engine versus the closed form
# ---------------------------------------------------------------------------

def _exact_degree(k: int) -> int:
    # every recursion step divides by a degree-2 form a.S; the common
    # denominator has at most one factor per step, and the formula side
    # adds at most 2 * 2^(k+1)
    return 2 * (len(plan(k).steps) + 1) + 4 * 2 ** (k + 1)


def check_exact_vs_formula(k: int, trials: int = 100, prime: int = DEFAULT_PRIME,
                           seed: int = 0, mode: str = "modular",
                           rational_spot_check: bool = True) -> dict:
    """Exact expectation of a k x k rank-1 matrix against ``f_main``.

    Equality is proved for k <= 3; at k = 4 the report is evidence for the
    conjectured formula, not a proof.  With ``rational_spot_check`` a single
    exact rational comparison is added for k <= 3 in modular mode.
    """
    if not 1 <= k <= MAX_K:
        raise DomainError(f"exact engine supports k <= {MAX_K}")
    status = "proved" if k <= 3 else "conjectural"
    report = _new_report("exact", status, mode, {"k": k}, trials)

    def compare(r, c, stage):
        exact = expected_min_exact(rank_one_matrix(r, c), k)
        formula = f_main(k, r, c)
        if exact != formula:
            report["mismatches"].append({"stage": stage, "r": _show_vec(r), "c": _show_vec(c),
                                         "exact": _show(exact), "formula": _show(formula)})

    def body(rng):
        r = random_point(rng, k, mode, prime)
        c = random_point(rng, k, mode, prime)
        compare(r, c, mode)

    _run_trials(report, trials, seed, body)
    if rational_spot_check and mode == "modular" and k <= 3:
        rng = _rng(seed, trials)
        compare(random_point(rng, k, "rational"), random_point(rng, k, "rational"), "rational")
        report["rational_spot_check"] = True
    return _finish(report, _exact_degree(k), prime)


def check_all_ones_modular(k: int, trials: int = 20, prime: int = DEFAULT_PRIME,
                           seed: int = 0) -> dict:
    """Exact engine at rates all equal to t (mod p) against parisi(k)/t.

    Scaling every rate by t divides the expectation by t, so each random t
    is an independent check of the all-ones value.
    """
    from .formulas import parisi
    from .arith import rational_to_mod

    report = _new_report("all_ones", "proved" if k <= 3 else "conjectural", "modular",
                         {"k": k}, trials)
    target = rational_to_mod(parisi(k), prime)

    def body(rng):
        t = ModScalar(rng.randint(1, prime - 1), prime)
        value = expected_min_exact([[t] * k for _ in range(k)], k)
        if value * t != target:
            report["mismatches"].append({"t": _show(t), "value": _show(value),
                                         "expected": _show(target / t)})

    _run_trials(report, trials, seed, body)
    return _finish(report, _exact_degree(k), prime)


# ---------------------------------------------------------------------------
# suites used by the command line
# ---------------------------------------------------------------------------

SUITES = ("forms", "basic", "limits", "mono", "exact4")


def run_suite(name: str, trials: int | None = None, prime: int = DEFAULT_PRIME,
              seed: int = 0, mode: str = "rational") -> list[dict]:
    """Run one named suite over its standard parameter grid."""
    if name == "forms":
        t = 100 if trials is None else trials
        return [check_form_equivalence(k, m, n, t, mode, seed, prime)
                for m in range(1, 5) for n in range(1, 5) for k in range(1, min(m, n) + 1)]
    if name == "basic":
        t = 20 if trials is None else trials
        return [check_basic_identity(n, H, L, t, mode, seed, prime)
                for n in range(2, 6) for H, L in admissible_basic(n)]
    if name == "limits":
        t = 50 if trials is None else trials
        return [check_limit_identities(k, m, n, l, t, mode, seed, prime)
                for k, m, n, l in valid_limit_params()]
    if name == "mono":
        t = 50 if trials is None else trials
        return [check_monotonicity_and_derivative(k, m, n, t, seed)
                for m in range(1, 5) for n in range(1, 5) for k in range(1, min(m, n) + 1)]
    if name == "exact4":
        t = 100 if trials is None else trials
        return [check_exact_vs_formula(k, t if k == 4 else min(t, 20), prime, seed)
                for k in (2, 3, 4)]
    raise DomainError(f"unknown suite {name!r}; expected one of {SUITES}")


def summarize(reports: list[dict]) -> dict:
    proved_fail = sum(1 for r in reports if r["status"] == "proved" and not r["passed"])
    conj_fail = sum(1 for r in reports if r["status"] == "conjectural" and not r["passed"])
    return {
        "checks": len(reports),
        "proved_failures": proved_fail,
        "conjectural_mismatches": conj_fail,
        "passed": proved_fail == 0 and conj_fail == 0,
    }
