"""k-reduction of a cost matrix and its decomposition into V_IJ generators.

All routines here work over exact ``Fraction`` entries; floating-point ties
would make the participation tests meaningless.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .assignment import (
    as_matrix,
    assignment_value,
    min_k_bruteforce,
    min_through,
    shape,
)
from .errors import ContractViolation, DomainError


def _exact(X) -> list[list[Fraction]]:
    out = []
    for row in as_matrix(X):
        new = []
        for x in row:
            if isinstance(x, float):
                raise DomainError("reduction requires exact (int or Fraction) entries")
            new.append(Fraction(x))
        out.append(new)
    return out


@dataclass(frozen=True)
class VIJGenerator:
    """``coefficient * V_IJ``: an all-ones matrix with rows I and columns J zeroed."""

    rows: frozenset
    cols: frozenset
    coefficient: Fraction


@dataclass(frozen=True)
class LambdaMu:
    lam: tuple
    mu: tuple


def vij_matrix(m: int, n: int, rows, cols) -> list[list[int]]:
    return [[0 if (i in rows or j in cols) else 1 for j in range(n)] for i in range(m)]


def k_reduce(X, k: int, entry_order=None):
    """Greedily subtract as much as possible from each cell while keeping min_k fixed.

    Returns ``(Y, removed)`` where ``removed`` maps each cell to the amount
    subtracted from it.  ``entry_order`` defaults to row-major.
    """
    Y = _exact(X)
    m, n = shape(Y)
    s, _ = min_k_bruteforce(Y, k)
    if entry_order is None:
        entry_order = [(i, j) for i in range(m) for j in range(n)]
    removed = {}
    for cell in entry_order:
        i, j = cell
        if Y[i][j] == 0:
            removed[cell] = Fraction(0)
            continue
        alpha = min(Y[i][j], min_through(Y, k, cell) - s)
        Y[i][j] -= alpha
        removed[cell] = alpha
    return Y, removed


def is_k_reduced(Y, k: int) -> bool:
    Y = _exact(Y)
    m, n = shape(Y)
    s, _ = min_k_bruteforce(Y, k)
    return all(
        Y[i][j] == 0 or min_through(Y, k, (i, j)) == s
        for i in range(m)
        for j in range(n)
    )


def participation_mask(Y, k: int) -> list[list[bool]]:
    Y = _exact(Y)
    m, n = shape(Y)
    s, _ = min_k_bruteforce(Y, k)
    return [[min_through(Y, k, (i, j)) == s for j in range(n)] for i in range(m)]


def lambda_mu(Y, k: int, check: bool = True) -> LambdaMu:
    """Row and column potentials with ``y_ij == max(0, lam_i + mu_j)``.

    Built from the largest entry ``d = y_tu`` (first in row-major order):
    ``lam_i = y_iu`` and ``mu_j = y_tj - d``.  With ``check`` the input must
    be k-reduced.
    """
    Y = _exact(Y)
    if check and not is_k_reduced(Y, k):
        raise ContractViolation("matrix is not k-reduced")
    m, n = shape(Y)
    t, u = 0, 0
    for i in range(m):
        for j in range(n):
            if Y[i][j] > Y[t][u]:
                t, u = i, j
    d = Y[t][u]
    lam = tuple(Y[i][u] for i in range(m))
    mu = tuple(Y[t][j] - d for j in range(n))
    return LambdaMu(lam, mu)


def _pick_pivot(Z, k: int):
    """Locate (i, j) with Z[i][j] > 0, i + j <= k - 1 (0-based) and zeros above/left."""
    m, n = shape(Z)
    start = None
    for i in range(min(k, m)):
        j = k - 1 - i
        if j < n and Z[i][j] > 0:
            start = (i, j)
            break
    if start is None:
        raise ContractViolation("no positive entry on the k-th antidiagonal")
    i, j = start
    moved = True
    while moved:
        moved = False
        while i > 0 and Z[i - 1][j] > 0:
            i -= 1
            moved = True
        while j > 0 and Z[i][j - 1] > 0:
            j -= 1
            moved = True
    return i, j


def vij_decompose(Y, k: int, sigma) -> list[VIJGenerator]:
    """Write a k-reduced ``Y`` as a nonnegative combination of V_IJ matrices.

    ``sigma`` must be a minimum k-assignment of ``Y``.  At every step rows and
    columns are stably sorted by their potentials so that ``Y`` is weakly
    increasing along rows and columns; generators are reported in the
    original indexing.
    """
    Y = _exact(Y)
    m, n = shape(Y)
    sigma = tuple(sorted(sigma))
    s, _ = min_k_bruteforce(Y, k)
    if len(sigma) != k or assignment_value(Y, sigma) != s:
        raise ContractViolation("sigma is not a minimum k-assignment")
    gens = []
    while any(x != 0 for row in Y for x in row):
        pot = lambda_mu(Y, k)
        row_perm = sorted(range(m), key=lambda i: pot.lam[i])
        col_perm = sorted(range(n), key=lambda j: pot.mu[j])
        Z = [[Y[i][j] for j in col_perm] for i in row_perm]
        pi, pj = _pick_pivot(Z, k)
        coef = Z[pi][pj]
        rows = frozenset(row_perm[:pi])
        cols = frozenset(col_perm[:pj])
        for i in range(m):
            if i in rows:
                continue
            for j in range(n):
                if j not in cols:
                    Y[i][j] -= coef
        gens.append(VIJGenerator(rows, cols, coef))
    return gens


def _components(cells):
    """Connected components of cells linked by sharing a row or a column."""
    by_row, by_col = {}, {}
    for c in cells:
        by_row.setdefault(c[0], []).append(c)
        by_col.setdefault(c[1], []).append(c)
    seen, comps = set(), []
    for c in sorted(cells):
        if c in seen:
            continue
        stack, comp = [c], []
        seen.add(c)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in by_row[x[0]] + by_col[x[1]]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps, by_row, by_col


def _walk(comp, by_row, by_col):
    """Order the cells of a chain or cycle so consecutive cells share a line."""
    def nbrs(x):
        return [y for y in by_row[x[0]] + by_col[x[1]] if y != x]

    ends = sorted(x for x in comp if len(nbrs(x)) < 2)
    start = ends[0] if ends else min(comp)
    order, prev, cur = [start], None, start
    while len(order) < len(comp):
        nxt = sorted(y for y in nbrs(cur) if y != prev and y not in order[-2:])[0]
        order.append(nxt)
        prev, cur = cur, nxt
    return order


def split_double_assignment(T, k: int):
    """Split a {0,1,2} matrix with line sums <= 2 and total 2k into two k-assignments."""
    m, n = shape(T)
    for row in T:
        for x in row:
            if x not in (0, 1, 2):
                raise ContractViolation("entries must be 0, 1 or 2")
    if any(sum(row) > 2 for row in T) or any(
        sum(T[i][j] for i in range(m)) > 2 for j in range(n)
    ):
        raise ContractViolation("row and column sums must be at most 2")
    if sum(map(sum, T)) != 2 * k:
        raise ContractViolation(f"total must equal 2k = {2 * k}")
    sigma, tau = [], []
    ones = []
    for i in range(m):
        for j in range(n):
            if T[i][j] == 2:
                sigma.append((i, j))
                tau.append((i, j))
            elif T[i][j] == 1:
                ones.append((i, j))
    comps, by_row, by_col = _components(ones)
    odd_first = sigma
    for comp in comps:
        order = _walk(comp, by_row, by_col)
        first, second = (sigma, tau)
        if len(order) % 2:
            # odd chains alternate which side receives the extra cell
            first = odd_first
            second = tau if first is sigma else sigma
            odd_first = second
        first.extend(order[0::2])
        second.extend(order[1::2])
    return tuple(sorted(sigma)), tuple(sorted(tau))
