"""Minimum k-assignment solvers over a generic ordered scalar.

Matrices are plain nested sequences (row-major); positions are 0-based
``(row, col)`` pairs.  An assignment is represented as a tuple of positions
sorted by row.  Every routine only uses ``+`` and comparisons on entries, so
``int``, ``Fraction`` and ``float`` entries all work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

from .errors import DomainError, EnumerationCapError

#: Default cap on k! C(m,k) C(n,k) for brute-force enumeration.
ENUMERATION_CAP = 10**7
#: Largest auxiliary matrix solved by brute force in the incremental solver.
INNER_CAP = 8


def as_matrix(X) -> tuple:
    """Validate a rectangular, nonnegative matrix and return it as a tuple of tuples."""
    rows = tuple(tuple(row) for row in X)
    if not rows or not rows[0]:
        raise DomainError("matrix must have at least one row and one column")
    n = len(rows[0])
    for row in rows:
        if len(row) != n:
            raise DomainError("ragged matrix")
        for x in row:
            if x < 0:
                raise DomainError(f"negative entry {x!r}")
    return rows


def shape(X) -> tuple[int, int]:
    return len(X), len(X[0])


def count_assignments(m: int, n: int, k: int) -> int:
    return math.factorial(k) * math.comb(m, k) * math.comb(n, k)


def iter_assignments(m: int, n: int, k: int, rows=None, cols=None):
    """Yield every k-assignment as a row-sorted tuple of positions.

    ``rows``/``cols`` restrict the search to sub-ranges of the matrix.
    """
    rows = range(m) if rows is None else sorted(rows)
    cols = range(n) if cols is None else sorted(cols)
    for rsel in combinations(rows, k):
        for csel in permutations(cols, k):
            yield tuple(zip(rsel, csel))


def assignment_value(X, sigma):
    return sum((X[i][j] for i, j in sigma), start=0 * X[0][0])


def _check_k(X, k: int, cap: int) -> tuple[int, int]:
    m, n = shape(as_matrix(X))
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)} for a {m}x{n} matrix")
    total = count_assignments(m, n, k)
    if total > cap:
        raise EnumerationCapError(f"{total} {k}-assignments exceed the cap {cap}")
    return m, n


def min_k_bruteforce(X, k: int, cap: int = ENUMERATION_CAP):
    """Return ``(value, minimizers)`` by exhaustive enumeration.

    ``minimizers`` lists every k-assignment attaining the minimum, sorted
    lexicographically; ties are decided by exact scalar equality.
    """
    m, n = _check_k(X, k, cap)
    best = None
    found = []
    for sigma in iter_assignments(m, n, k):
        v = assignment_value(X, sigma)
        if best is None or v < best:
            best, found = v, [sigma]
        elif v == best:
            found.append(sigma)
    found.sort()
    return best, found


def min_through(X, k: int, pos, cap: int = ENUMERATION_CAP):
    """Minimum value over k-assignments that use ``pos``."""
    m, n = _check_k(X, k, cap)
    i0, j0 = pos
    if not (0 <= i0 < m and 0 <= j0 < n):
        raise DomainError(f"position {pos} outside a {m}x{n} matrix")
    rest_rows = [i for i in range(m) if i != i0]
    rest_cols = [j for j in range(n) if j != j0]
    best = None
    if k == 1:
        return X[i0][j0]
    for sigma in iter_assignments(m, n, k - 1, rest_rows, rest_cols):
        v = assignment_value(X, sigma)
        if best is None or v < best:
            best = v
    return X[i0][j0] + best


def participates(X, k: int, pos, cap: int = ENUMERATION_CAP) -> bool:
    """True iff some minimum k-assignment of ``X`` uses ``pos``."""
    value, _ = min_k_bruteforce(X, k, cap)
    return min_through(X, k, pos, cap) == value


def _argmin_lex(cells, X):
    """Position of the smallest entry among ``cells``, ties broken by (row, col)."""
    best = None
    for i, j in sorted(cells):
        if best is None or X[i][j] < X[best[0]][best[1]]:
            best = (i, j)
    return best


def aux_matrix(X, rows, cols):
    """Build the auxiliary matrix over the submatrix with the given rows/cols.

    ``rows`` and ``cols`` are sequences of equal length ``k-1``; their order
    fixes the order of the first ``k-1`` rows/columns of the result.  Returns
    ``(Y, provenance)`` where ``Y`` is ``k x k`` and ``provenance`` maps each
    appended cell of ``Y`` to the position of ``X`` it copies.
    """
    m, n = shape(X)
    rows, cols = list(rows), list(cols)
    t = len(rows)
    if len(cols) != t:
        raise DomainError("row and column index sets must have the same size")
    if len(set(rows)) != t or len(set(cols)) != t:
        raise DomainError("repeated row or column index")
    if t >= min(m, n):
        raise DomainError("no complementary entries: submatrix spans min(m, n) lines")
    out_rows = [i for i in range(m) if i not in rows]
    out_cols = [j for j in range(n) if j not in cols]
    Y = [[X[i][j] for j in cols] + [None] for i in rows]
    Y.append([None] * (t + 1))
    prov = {}
    for a, i in enumerate(rows):
        src = _argmin_lex([(i, j) for j in out_cols], X)
        Y[a][t] = X[src[0]][src[1]]
        prov[(a, t)] = src
    for b, j in enumerate(cols):
        src = _argmin_lex([(i, j) for i in out_rows], X)
        Y[t][b] = X[src[0]][src[1]]
        prov[(t, b)] = src
    src = _argmin_lex([(i, j) for i in out_rows for j in out_cols], X)
    Y[t][t] = X[src[0]][src[1]]
    prov[(t, t)] = src
    return tuple(tuple(row) for row in Y), prov


@dataclass(frozen=True)
class Flag:
    """Nested chain of submatrices; ``values[t]`` is min_{t+1}(X)."""

    rows: tuple
    cols: tuple
    values: tuple

    def submatrix(self, t: int) -> tuple[frozenset, frozenset]:
        """Row and column sets of the t x t member of the flag."""
        return frozenset(self.rows[:t]), frozenset(self.cols[:t])


def min_k_incremental(X, k: int, inner_cap: int = INNER_CAP) -> Flag:
    """Grow a flag M_1 < M_2 < ... < M_k one row and column at a time.

    Each step solves the minimum assignment of the auxiliary matrix over the
    current submatrix and appends the row and column of ``X`` that its
    last-row and last-column entries were copied from.
    """
    m, n = shape(X)
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)} for a {m}x{n} matrix")
    if k > inner_cap:
        raise EnumerationCapError(f"k={k} exceeds the inner brute-force cap {inner_cap}")
    i0, j0 = _argmin_lex([(i, j) for i in range(m) for j in range(n)], X)
    rows, cols, values = [i0], [j0], [X[i0][j0]]
    for t in range(2, k + 1):
        Y, prov = aux_matrix(X, rows, cols)
        value, minimizers = min_k_bruteforce(Y, t)
        sigma = minimizers[0]
        last = t - 1
        new_row = new_col = None
        for a, b in sigma:
            if a == last and b == last:
                new_row, new_col = prov[(a, b)]
            elif a == last:
                new_row = prov[(a, b)][0]
            elif b == last:
                new_col = prov[(a, b)][1]
        rows.append(new_row)
        cols.append(new_col)
        values.append(value)
    return Flag(tuple(rows), tuple(cols), tuple(values))


def transpose(X) -> tuple:
    return tuple(zip(*X))
