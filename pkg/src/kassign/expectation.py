"""Exact expected minimum k-assignment for square rate matrices (k = m = n <= 4).

The expectation E(A, Z) with a set Z of cells pinned to zero satisfies

    E(A, Z) = r / (A.S) + sum_{(i,j) in S} a_ij / (A.S) * E(A, Z + {(i,j)})

whenever every minimum k-assignment of every matrix with zero set Z meets
the cell set S in exactly r cells; E(A, Z) = 0 once Z contains a perfect
matching.  The set of reachable zero patterns and the S chosen for each
depend only on k, so they are computed once and cached as a *plan*; any
field scalar (``Fraction``, ``ModScalar``) can then be pushed through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .arith import ModScalar
from .errors import DomainError, UnluckyPointError, UncoveredPatternError

MAX_K = 4

#: S-selection strategies, tried in order.
DEFAULT_PRIORITY = ("row", "col", "block2", "block1")
_BLOCK_ORDER = ("block2", "block1")


def _check_priority(priority) -> tuple:
    """Block cases are only sound once the earlier cases have failed.

    A zero-free block meets every minimum assignment in exactly r cells
    only when no zero-free row or column exists (and, for the r=1 block at
    k=4, no zero-free 3x3 block either).  So "row" and "col" may come in
    either order, but must precede "block2", which must precede "block1".
    """
    priority = tuple(priority)
    if sorted(priority) != sorted(DEFAULT_PRIORITY) or priority[2:] != _BLOCK_ORDER:
        raise DomainError(
            f"priority must be row/col in either order, then {_BLOCK_ORDER}; got {priority}"
        )
    return priority


def _bit(i: int, j: int, k: int) -> int:
    return 1 << (i * k + j)


def _cells(mask: int, k: int) -> list[tuple[int, int]]:
    return [(b // k, b % k) for b in range(k * k) if mask >> b & 1]


def _to_mask(zeros, k: int) -> int:
    mask = 0
    for i, j in zeros:
        if not (0 <= i < k and 0 <= j < k):
            raise DomainError(f"zero position {(i, j)} outside a {k}x{k} matrix")
        mask |= _bit(i, j, k)
    return mask


def _max_matching(mask: int, k: int) -> int:
    adj = [[j for j in range(k) if mask & _bit(i, j, k)] for i in range(k)]
    match_col = [-1] * k

    def augment(i, seen):
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if match_col[j] < 0 or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    return sum(augment(i, [False] * k) for i in range(k))


def base_case(zeros, k: int) -> bool:
    """True iff ``zeros`` contains k cells with no two in the same row or column."""
    return _max_matching(_to_mask(zeros, k), k) >= k


def _zero_free(mask: int, rows, cols, k: int) -> bool:
    return not any(mask & _bit(i, j, k) for i in rows for j in cols)


def _blocks(k: int, excess: int):
    # shapes a x b with a + b = k + excess, both sides strictly inside the matrix
    for a in range(2, k):
        b = k + excess - a
        if 2 <= b < k:
            yield a, b


def _find_s_mask(mask: int, k: int, priority) -> tuple[tuple, int]:
    full = range(k)
    for case in priority:
        if case == "row":
            for i in full:
                if _zero_free(mask, [i], full, k):
                    return tuple((i, j) for j in full), 1
        elif case == "col":
            for j in full:
                if _zero_free(mask, full, [j], k):
                    return tuple((i, j) for i in full), 1
        elif case in ("block2", "block1"):
            excess = 2 if case == "block2" else 1
            for a, b in _blocks(k, excess):
                for rows in combinations(full, a):
                    for cols in combinations(full, b):
                        if _zero_free(mask, rows, cols, k):
                            return tuple((i, j) for i in rows for j in cols), excess
        else:
            raise DomainError(f"unknown S-selection case {case!r}")
    raise UncoveredPatternError(_cells(mask, k), k)


def find_S(zeros, k: int, priority=DEFAULT_PRIORITY) -> tuple[tuple, int]:
    """Choose a cell set S and the count r of its cells used by every minimum k-assignment.

    Cases, in the default priority order (only row/column may be swapped): a
    zero-free row or column (r=1);
    a zero-free block with sides summing to k+2 (r=2, the 3x3 block when
    k=4); a zero-free block with sides summing to k+1 (r=1: 2x3 or 3x2 when
    k=4, 2x2 when k=3).  Each is the lexicographically first match.
    """
    if not 1 <= k <= MAX_K:
        raise DomainError(f"exact recursion supports k <= {MAX_K}")
    priority = _check_priority(priority)
    mask = _to_mask(zeros, k)
    if _max_matching(mask, k) >= k:
        raise DomainError("zero pattern is already a base case")
    return _find_s_mask(mask, k, priority)


@dataclass(frozen=True)
class Plan:
    """Reachable zero patterns for one k, children listed after parents."""

    k: int
    order: tuple            # masks, parents before children
    base: frozenset         # masks that are base cases
    steps: dict             # mask -> (S cells, r)

    @property
    def distinct_s(self) -> int:
        return len({s for s, _ in self.steps.values()})


@lru_cache(maxsize=None)
def plan(k: int, priority=DEFAULT_PRIORITY) -> Plan:
    if not 1 <= k <= MAX_K:
        raise DomainError(f"exact recursion supports k <= {MAX_K}")
    priority = _check_priority(priority)
    steps, base = {}, set()
    seen = {0}
    frontier = [0]
    while frontier:
        mask = frontier.pop()
        if _max_matching(mask, k) >= k:
            base.add(mask)
            continue
        S, r = _find_s_mask(mask, k, priority)
        steps[mask] = (S, r)
        for i, j in S:
            child = mask | _bit(i, j, k)
            if child not in seen:
                seen.add(child)
                frontier.append(child)
    order = tuple(sorted(seen, key=lambda x: (bin(x).count("1"), x)))
    return Plan(k, order, frozenset(base), steps)


def _check_rates(A, k: int) -> list[list]:
    if not 1 <= k <= MAX_K:
        raise DomainError(f"exact recursion supports k = m = n <= {MAX_K}, got k={k}")
    rows = [list(row) for row in A]
    if len(rows) != k or any(len(row) != k for row in rows):
        raise DomainError(f"rate matrix must be {k}x{k} (k = m = n)")
    for row in rows:
        for j, a in enumerate(row):
            if isinstance(a, int):
                row[j] = a = Fraction(a)
            if isinstance(a, ModScalar):
                if a == 0:
                    raise UnluckyPointError("zero rate in modular evaluation")
            elif not a > 0:
                raise DomainError(f"rates must be positive, got {a!r}")
    return rows


def _step(A, S, r, child_values):
    weights = [A[i][j] for i, j in S]
    total = sum(weights[1:], start=weights[0])
    if total == 0:
        raise UnluckyPointError("zero denominator A.S")
    acc = r / total
    for w, v in zip(weights, child_values):
        acc = acc + w * v / total
    return acc


def expected_min_exact(A, k: int, memo: bool = True, priority=DEFAULT_PRIORITY):
    """Expected minimum k-assignment of a k x k exponential matrix with rates ``A``.

    Works over any field scalar; ``ModScalar`` rates give the residue of the
    exact rational answer.  ``memo=False`` recomputes shared sub-patterns
    (slow; for cross-checking only).
    """
    A = _check_rates(A, k)
    if not memo:
        return _expected_naive(A, k, 0, _check_priority(priority))
    p = plan(k, tuple(priority))
    values = {}
    for mask in reversed(p.order):
        if mask in p.base:
            values[mask] = 0
            continue
        S, r = p.steps[mask]
        kids = [values[mask | _bit(i, j, k)] for i, j in S]
        values[mask] = _step(A, S, r, kids)
    return values[0]


def _expected_naive(A, k: int, mask: int, priority):
    if _max_matching(mask, k) >= k:
        return 0
    S, r = _find_s_mask(mask, k, priority)
    kids = [_expected_naive(A, k, mask | _bit(i, j, k), priority) for i, j in S]
    return _step(A, S, r, kids)


def rank_one_matrix(r, c) -> list[list]:
    return [[ri * cj for cj in c] for ri in r]
