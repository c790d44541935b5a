"""Closed-form expected-minimum expressions for rank-1 exponential rate matrices.

Every evaluator is generic over the scalar field: pass ``Fraction`` rates for
exact identities, :class:`~kassign.arith.ModScalar` rates for random-point
checks modulo a prime, or :class:`~kassign.arith.Dual` rates for exact
derivatives.  Row weights are ``r`` (length m), column weights ``c``
(length n).  Subsets are enumerated as bitmasks, so the cost is on the order
of ``2**(m+n)`` terms; m, n up to about 12 is the intended scale.

Index sets in the public API are iterables of 0-based indices.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .arith import binomial
from .errors import DomainError


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _mask(indices, size: int) -> int:
    mask = 0
    for i in indices:
        if not 0 <= i < size:
            raise DomainError(f"index {i} out of range 0..{size - 1}")
        if mask >> i & 1:
            raise DomainError(f"repeated index {i}")
        mask |= 1 << i
    return mask


def _members(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def complement_sums(w) -> list:
    """``out[mask] = sum of w[i] over i not in mask`` for every mask."""
    size = len(w)
    subset = [0] * (1 << size)
    for mask in range(1, 1 << size):
        low = mask & -mask
        subset[mask] = subset[mask ^ low] + w[low.bit_length() - 1]
    total = subset[-1]
    return [total - s for s in subset]


def _field(w) -> list:
    # plain ints would fall into float division
    return [Fraction(x) if isinstance(x, int) else x for x in w]


def _check_rates(k: int, r, c):
    r, c = _field(r), _field(c)
    m, n = len(r), len(c)
    if m < 1 or n < 1:
        raise DomainError("rate vectors must be nonempty")
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)}")
    return m, n, r, c


# ---------------------------------------------------------------------------
# urn probabilities
# ---------------------------------------------------------------------------

def pr_urn_seq(weights, order):
    """Probability that weighted draws without replacement start with ``order``."""
    order = list(order)
    weights = _field(weights)
    _mask(order, len(weights))
    remaining = sum(weights, start=0)
    p = 1
    for i in order:
        p = p * weights[i] / remaining
        remaining = remaining - weights[i]
    return p


def _pr_first_set_orderings(weights, pool_mask: int, target_mask: int):
    # probability that the first |target| draws from the balls in pool are exactly target
    total = sum((weights[i] for i in _members(pool_mask)), start=0)
    out = 0
    for perm in permutations(_members(target_mask)):
        p, remaining = 1, total
        for i in perm:
            p = p * weights[i] / remaining
            remaining = remaining - weights[i]
        out = out + p
    return out


def _pr_first_set_inclexcl(weights, pool_mask: int, target_mask: int):
    if target_mask == pool_mask:
        return 1
    outside = [weights[i] for i in _members(pool_mask & ~target_mask)]
    rest = sum(outside, start=0)
    out = 0
    # sub is the part of the target still in the urn; its size fixes the sign
    for sub in _submasks(target_mask):
        denom = rest + sum((weights[i] for i in _members(sub)), start=0)
        term = rest / denom
        out = out + term if _popcount(sub) % 2 == 0 else out - term
    return out


def pr_urn_set(weights, subset, method: str = "orderings"):
    """Probability that the first ``len(subset)`` draws are exactly ``subset``.

    ``method`` selects the sum over orderings or the inclusion-exclusion
    expression; both give the same value.
    """
    weights = _field(weights)
    full = (1 << len(weights)) - 1
    target = _mask(subset, len(weights))
    if method == "orderings":
        return _pr_first_set_orderings(weights, full, target)
    if method == "inclexcl":
        return _pr_first_set_inclexcl(weights, full, target)
    raise DomainError(f"unknown method {method!r}")


def pr_urn_nested(weights, inner, outer):
    """Probability the first ``|inner|`` draws are ``inner`` and the first ``|outer|`` are ``outer``."""
    weights = _field(weights)
    size = len(weights)
    t_mask, i_mask = _mask(inner, size), _mask(outer, size)
    if t_mask & ~i_mask:
        raise DomainError("inner set must be contained in the outer set")
    full = (1 << size) - 1
    first = _pr_first_set_orderings(weights, full, t_mask)
    return first * _pr_first_set_orderings(weights, full & ~t_mask, i_mask & ~t_mask)


# ---------------------------------------------------------------------------
# the six forms of F(k, r, c)
# ---------------------------------------------------------------------------

def f_main(k: int, r, c):
    """Signed binomial sum over proper subsets I, J with |I| + |J| < k."""
    m, n, r, c = _check_rates(k, r, c)
    comp_r, comp_c = complement_sums(r), complement_sums(c)
    total = 0
    for I in range((1 << m) - 1):
        a = _popcount(I)
        if a >= k:
            continue
        for J in range((1 << n) - 1):
            b = _popcount(J)
            e = k - 1 - a - b
            if e < 0:
                continue
            coef = binomial(m + n - 1 - a - b, e)
            if e % 2:
                coef = -coef
            total = total + coef / (comp_r[I] * comp_c[J])
    return total


def _reciprocal_sums_by_size(w, limit: int) -> list:
    size = len(w)
    comp = complement_sums(w)
    sums = [0] * limit
    for mask in range((1 << size) - 1):
        a = _popcount(mask)
        if a < limit:
            sums[a] = sums[a] + 1 / comp[mask]
    return sums


def f_negbinom(k: int, r, c):
    """Negative-upper-index binomial form, grouped by subset sizes."""
    m, n, r, c = _check_rates(k, r, c)
    sr = _reciprocal_sums_by_size(r, k)
    sc = _reciprocal_sums_by_size(c, k)
    total = 0
    for a in range(k):
        for b in range(k - a):
            total = total + binomial(k - 1 - m - n, k - 1 - a - b) * sr[a] * sc[b]
    return total


def f_inclexcl(k: int, r, c):
    """Alternating sum over nested pairs I <= I', J <= J' with |I'| + |J'| < k."""
    m, n, r, c = _check_rates(k, r, c)
    comp_r, comp_c = complement_sums(r), complement_sums(c)
    total = 0
    for Ip in range((1 << m) - 1):
        a = _popcount(Ip)
        if a >= k:
            continue
        for Jp in range((1 << n) - 1):
            b = _popcount(Jp)
            if a + b >= k:
                continue
            for I in _submasks(Ip):
                for J in _submasks(Jp):
                    term = 1 / (comp_r[I] * comp_c[J])
                    if (a - _popcount(I) + b - _popcount(J)) % 2:
                        total = total - term
                    else:
                        total = total + term
    return total


def f_urn(k: int, r, c):
    """Sum of Pr(r, I) Pr(c, J) over complementary sums; every term is nonnegative."""
    _check_rates(k, r, c)
    return sum(urn_terms(k, r, c), start=0)


def urn_terms(k: int, r, c) -> list:
    """Individual terms of :func:`f_urn` (each is >= 0 at positive rates)."""
    m, n, r, c = _check_rates(k, r, c)
    comp_r, comp_c = complement_sums(r), complement_sums(c)
    full_r, full_c = (1 << m) - 1, (1 << n) - 1
    pr_r = {I: _pr_first_set_orderings(r, full_r, I) for I in range(full_r) if _popcount(I) < k}
    pr_c = {J: _pr_first_set_orderings(c, full_c, J) for J in range(full_c) if _popcount(J) < k}
    terms = []
    for I, pi in pr_r.items():
        a = _popcount(I)
        for J, pj in pr_c.items():
            if a + _popcount(J) < k:
                terms.append(pi * pj / (comp_r[I] * comp_c[J]))
    return terms


def _flag_tail(k: int, r_seq, c_seq, R, C):
    # sum over t + u < k of 1 / ((R - first t of r_seq)(C - first u of c_seq))
    r_left, c_left = [R], [C]
    for x in r_seq:
        r_left.append(r_left[-1] - x)
    for x in c_seq:
        c_left.append(c_left[-1] - x)
    total = 0
    for t in range(k):
        for u in range(k - t):
            total = total + 1 / (r_left[t] * c_left[u])
    return total


def f_flag_ordered(k: int, r, c):
    """Sum over ordered (k-1)-sequences of rows and columns (flags)."""
    m, n, r, c = _check_rates(k, r, c)
    R, C = sum(r, start=0), sum(c, start=0)
    total = 0
    c_seqs = [(s, pr_urn_seq(c, s)) for s in permutations(range(n), k - 1)]
    for rs in permutations(range(m), k - 1):
        pr = pr_urn_seq(r, rs)
        rvals = [r[i] for i in rs]
        for cs, pc in c_seqs:
            total = total + pr * pc * _flag_tail(k, rvals, [c[j] for j in cs], R, C)
    return total


def f_component(ell: int, w, subset):
    """``sum over S <= subset of (-1)^(|subset|-|S|) / (sum of w outside S)^ell``.

    ``subset`` must be a proper subset of the index range.
    """
    if ell < 1:
        raise DomainError("ell must be >= 1")
    w = _field(w)
    mask = _mask(subset, len(w))
    if mask == (1 << len(w)) - 1:
        raise DomainError("subset must be proper")
    return _f_component_mask(ell, w, complement_sums(w), mask)


def _f_component_mask(ell: int, w, comp, mask: int):
    size = _popcount(mask)
    total = 0
    for sub in _submasks(mask):
        term = 1 / comp[sub] ** ell
        total = total + term if (size - _popcount(sub)) % 2 == 0 else total - term
    return total


def f_fg(k: int, r, c):
    """Sum of f(1, r, I') g(1, c, J') over proper I', J' with |I'| + |J'| < k."""
    m, n, r, c = _check_rates(k, r, c)
    comp_r, comp_c = complement_sums(r), complement_sums(c)
    fr = {I: _f_component_mask(1, r, comp_r, I) for I in range((1 << m) - 1) if _popcount(I) < k}
    gc = {J: _f_component_mask(1, c, comp_c, J) for J in range((1 << n) - 1) if _popcount(J) < k}
    total = 0
    for I, fv in fr.items():
        a = _popcount(I)
        for J, gv in gc.items():
            if a + _popcount(J) < k:
                total = total + fv * gv
    return total


FORMS = {
    "main": f_main,
    "negbinom": f_negbinom,
    "inclexcl": f_inclexcl,
    "urn": f_urn,
    "flag": f_flag_ordered,
    "fg": f_fg,
}


def derivative_r1_rhs(k: int, r, c, ell: int = 1):
    """``sum over |I'| + |J'| = k-1, 0 not in I' of ell! f(ell+1, r, I') g(1, c, J')``.

    Equals ``(-d/dr_0)^ell F(k, r, c)``.
    """
    m, n, r, c = _check_rates(k, r, c)
    comp_r, comp_c = complement_sums(r), complement_sums(c)
    fact = 1
    for i in range(2, ell + 1):
        fact *= i
    total = 0
    for I in range((1 << m) - 1):
        if I & 1:
            continue
        a = _popcount(I)
        if a > k - 1:
            continue
        fv = _f_component_mask(ell + 1, r, comp_r, I)
        for J in range((1 << n) - 1):
            if a + _popcount(J) == k - 1:
                total = total + fact * fv * _f_component_mask(1, c, comp_c, J)
    return total


# ---------------------------------------------------------------------------
# contributions of (k-1) x (k-1) submatrices
# ---------------------------------------------------------------------------

def _check_contribution(k: int, r, c, rows, cols):
    _check_rates(k, r, c)
    rows, cols = list(rows), list(cols)
    r, c = _field(r), _field(c)
    if len(rows) != k - 1 or len(cols) != k - 1:
        raise DomainError(f"row and column sets must have size k-1 = {k - 1}")
    _mask(rows, len(r))
    _mask(cols, len(c))
    return rows, cols, r, c


def contribution(k: int, r, c, rows, cols, form: str = "permutations"):
    """Predicted expectation of min_k times the indicator that rows x cols hosts the min (k-1)-assignment.

    ``form`` is ``"permutations"`` (sum over orderings of the two index sets)
    or ``"nested"`` (sum over subsets T <= rows, U <= cols).
    """
    rows, cols, r, c = _check_contribution(k, r, c, rows, cols)
    R, C = sum(r, start=0), sum(c, start=0)
    if form == "permutations":
        total = 0
        for rs in permutations(rows):
            pr = pr_urn_seq(r, rs)
            rvals = [r[i] for i in rs]
            for cs in permutations(cols):
                pc = pr_urn_seq(c, cs)
                total = total + pr * pc * _flag_tail(k, rvals, [c[j] for j in cs], R, C)
        return total
    if form == "nested":
        m, n = len(r), len(c)
        I, J = _mask(rows, m), _mask(cols, n)
        full_r, full_c = (1 << m) - 1, (1 << n) - 1
        comp_r, comp_c = complement_sums(r), complement_sums(c)

        def nested(w, full, T, outer):
            first = _pr_first_set_orderings(w, full, T)
            return first * _pr_first_set_orderings(w, full & ~T, outer & ~T)

        pr_r = {T: nested(r, full_r, T, I) for T in _submasks(I)}
        pr_c = {U: nested(c, full_c, U, J) for U in _submasks(J)}
        total = 0
        for T, pt in pr_r.items():
            for U, pu in pr_c.items():
                if _popcount(T) + _popcount(U) < k:
                    total = total + pt * pu / (comp_r[T] * comp_c[U])
        return total
    raise DomainError(f"unknown contribution form {form!r}")


# ---------------------------------------------------------------------------
# all-ones specializations
# ---------------------------------------------------------------------------

def cs_formula(k: int, m: int, n: int) -> Fraction:
    """``sum over i, j >= 0, i + j < k of 1 / ((m - i)(n - j))`` for k <= m <= n."""
    if not 1 <= k <= m <= n:
        raise DomainError(f"need 1 <= k <= m <= n, got k={k}, m={m}, n={n}")
    return sum(
        (Fraction(1, (m - i) * (n - j)) for i in range(k) for j in range(k - i)),
        start=Fraction(0),
    )


def parisi(k: int) -> Fraction:
    """``sum_{i=1}^k 1/i^2``."""
    if k < 1:
        raise DomainError("k must be >= 1")
    return sum((Fraction(1, i * i) for i in range(1, k + 1)), start=Fraction(0))
