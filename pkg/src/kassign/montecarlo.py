"""Seeded Monte Carlo estimates for random exponential matrices.

Random numbers come from numpy's counter-based Philox generator.  Each
chunk of samples gets its own key built from ``(seed, stream, chunk)``, and
within a chunk the Philox counter walks through ``(sample, row, col)`` in
row-major order, so a result depends only on ``(seed, samples, chunks)``
and never on thread count or scheduling.  Per-chunk accumulators are merged
in chunk order.

Minimum assignments are found by vectorized enumeration of all
k-assignments, which is fine for the matrix sizes used here (m, n <= 5).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .assignment import iter_assignments
from .errors import DomainError
from .formulas import contribution, f_main, pr_urn_seq, pr_urn_set

#: |z| above this fails a statistical check.
Z_THRESHOLD = 4.0
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 0
    samples: int = 100_000
    chunks: int = 1
    threads: int = 1
    batch: int = 1 << 16

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("samples must be >= 1")
        if not 1 <= self.chunks <= self.samples:
            raise DomainError("chunks must be in 1..samples")

    def chunk_sizes(self) -> list[int]:
        q, rem = divmod(self.samples, self.chunks)
        return [q + (1 if i < rem else 0) for i in range(self.chunks)]


@dataclass
class EstimateReport:
    mean: float
    stderr: float
    samples: int
    target: Fraction | None = None

    @property
    def z(self) -> float | None:
        if self.target is None:
            return None
        return z_score(self.mean, float(self.target), self.stderr)

    @property
    def passed(self) -> bool:
        return self.z is None or abs(self.z) <= Z_THRESHOLD

    def to_json(self) -> dict:
        out = {"mean": self.mean, "stderr": self.stderr, "samples": self.samples}
        if self.target is not None:
            t = Fraction(self.target)
            out.update(target=f"{t.numerator}/{t.denominator}", target_float=float(t), z=self.z)
        return out


def z_score(observed: float, expected: float, stderr: float) -> float:
    diff = observed - expected
    if stderr == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / stderr


def _report(total: float, total_sq: float, n: int, target=None) -> EstimateReport:
    mean = total / n
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    return EstimateReport(mean, math.sqrt(var / n), n, target)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def generator(seed: int, chunk: int = 0, stream: int = 0) -> np.random.Generator:
    """Philox generator for one (seed, stream, chunk) triple."""
    key = (seed & _MASK64) | (((stream & 0xFFFFFFFF) << 32 | (chunk & 0xFFFFFFFF)) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _rate_array(A) -> np.ndarray:
    arr = np.array([[float(a) for a in row] for row in A], dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise DomainError("rate matrix must be a nonempty 2-d grid")
    if not np.all(arr > 0):
        raise DomainError("rates must be positive")
    return arr


def sample_matrices(A, gen: np.random.Generator, count: int) -> np.ndarray:
    """``count`` independent matrices with x_ij = -ln(u_ij) / a_ij, u uniform on (0, 1]."""
    rates = A if isinstance(A, np.ndarray) else _rate_array(A)
    u = 1.0 - gen.random((count,) + rates.shape)
    return -np.log(u) / rates


def sample_matrix(A, gen: np.random.Generator) -> list[list[float]]:
    return sample_matrices(A, gen, 1)[0].tolist()


@lru_cache(maxsize=None)
def _assignment_table(m: int, n: int, k: int):
    sigmas = list(iter_assignments(m, n, k))
    rows = np.array([[i for i, _ in s] for s in sigmas], dtype=np.intp)
    cols = np.array([[j for _, j in s] for s in sigmas], dtype=np.intp)
    rmask = np.array([sum(1 << i for i, _ in s) for s in sigmas], dtype=np.int64)
    cmask = np.array([sum(1 << j for _, j in s) for s in sigmas], dtype=np.int64)
    return rows, cols, rmask, cmask


def min_k_batch(X: np.ndarray, k: int):
    """Minimum k-assignment of each matrix in a ``(b, m, n)`` batch.

    Returns ``(values, row_masks, col_masks)``.
    """
    _, m, n = X.shape
    rows, cols, rmask, cmask = _assignment_table(m, n, k)
    sums = X[:, rows, cols].sum(axis=2)
    idx = np.argmin(sums, axis=1)
    return sums[np.arange(len(idx)), idx], rmask[idx], cmask[idx]


def _run(A, cfg: SampleConfig, kernel, stream: int = 0):
    """Apply ``kernel(X) -> tuple of arrays`` to every batch and sum the results."""
    rates = _rate_array(A)
    sizes = cfg.chunk_sizes()

    def one_chunk(c):
        gen = generator(cfg.seed, c, stream)
        acc = None
        left = sizes[c]
        while left:
            b = min(left, cfg.batch)
            part = kernel(sample_matrices(rates, gen, b))
            acc = part if acc is None else tuple(x + y for x, y in zip(acc, part))
            left -= b
        return acc

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            parts = list(pool.map(one_chunk, range(cfg.chunks)))
    else:
        parts = [one_chunk(c) for c in range(cfg.chunks)]
    total = parts[0]
    for part in parts[1:]:
        total = tuple(x + y for x, y in zip(total, part))
    return total


def detect_rank_one(A):
    """Return exact ``(r, c)`` with a_ij = r_i c_j, or None (floats are never rank-1 here)."""
    if any(isinstance(a, float) for row in A for a in row):
        return None
    A = [[Fraction(a) for a in row] for row in A]
    r = [row[0] for row in A]
    c = [a / A[0][0] for a in A[0]]
    if all(A[i][j] == r[i] * c[j] for i in range(len(r)) for j in range(len(c))):
        return r, c
    return None


def _check_k(A, k):
    m, n = len(A), len(A[0])
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)}")
    return m, n


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def estimate_e_min(A, k: int, cfg: SampleConfig, target=None, stream: int = 0) -> EstimateReport:
    """Mean of min_k over sampled matrices; rank-1 exact rates get ``f_main`` as target."""
    _check_k(A, k)
    if target is None:
        rc = detect_rank_one(A)
        if rc is not None:
            target = f_main(k, *rc)

    def kernel(X):
        v, _, _ = min_k_batch(X, k)
        return float(v.sum()), float((v * v).sum())

    s, s2 = _run(A, cfg, kernel, stream)
    return _report(s, s2, cfg.samples, target)


def _binomial_z(count: int, n: int, p: float) -> float:
    freq = count / n
    var = p * (1 - p) / n
    return z_score(freq, p, math.sqrt(var))


@dataclass
class FlagReport:
    samples: int
    flags: list = field(default_factory=list)
    sets: list = field(default_factory=list)
    row_sets: list = field(default_factory=list)
    col_sets: list = field(default_factory=list)
    nesting_failures: int = 0

    def max_abs_z(self, key: str = "z") -> float:
        zs = [abs(e[key]) for group in (self.flags, self.sets, self.row_sets, self.col_sets)
              for e in group if key in e]
        return max(zs, default=0.0)

    @property
    def passed(self) -> bool:
        return (self.nesting_failures == 0
                and self.max_abs_z("z") <= Z_THRESHOLD
                and self.max_abs_z("independence_z") <= Z_THRESHOLD)

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "nesting_failures": self.nesting_failures,
            "max_abs_z": self.max_abs_z("z"),
            "max_abs_independence_z": self.max_abs_z("independence_z"),
            "flags": [_one_based(e) for e in self.flags],
            "sets": [_one_based(e) for e in self.sets],
            "row_sets": [_one_based(e) for e in self.row_sets],
            "col_sets": [_one_based(e) for e in self.col_sets],
        }


def _one_based(entry: dict) -> dict:
    out = dict(entry)
    for key in ("rows", "cols"):
        if key in out:
            out[key] = [i + 1 for i in out[key]]
    return out


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def estimate_flag_probs(r, c, k: int, cfg: SampleConfig) -> FlagReport:
    """Empirical flag and (row set, column set) frequencies against the urn predictions."""
    r = [Fraction(x) for x in r]
    c = [Fraction(x) for x in c]
    m, n = len(r), len(c)
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)}")
    A = [[ri * cj for cj in c] for ri in r]
    base = m * n
    n_flags = base ** k
    n_sets = 1 << (m + n)

    def kernel(X):
        b = X.shape[0]
        code = np.zeros(b, dtype=np.int64)
        prev_r = np.zeros(b, dtype=np.int64)
        prev_c = np.zeros(b, dtype=np.int64)
        bad = 0
        for t in range(1, k + 1):
            _, rm, cm = min_k_batch(X, t)
            new_r, new_c = rm & ~prev_r, cm & ~prev_c
            ok = ((rm & prev_r) == prev_r) & ((cm & prev_c) == prev_c)
            ok &= (new_r & (new_r - 1)) == 0
            ok &= (new_c & (new_c - 1)) == 0
            bad += int((~ok).sum())
            ri = np.log2(np.maximum(new_r, 1)).astype(np.int64)
            ci = np.log2(np.maximum(new_c, 1)).astype(np.int64)
            code = code * base + ri * n + ci
            prev_r, prev_c = rm, cm
        flags = np.bincount(code, minlength=n_flags)
        sets = np.bincount(prev_r << n | prev_c, minlength=n_sets)
        return flags, sets, bad

    flags, sets, bad = _run(A, cfg, kernel)
    N = cfg.samples
    report = FlagReport(N, nesting_failures=int(bad))
    for rs in permutations(range(m), k):
        pr = pr_urn_seq(r, rs)
        for cs in permutations(range(n), k):
            code = 0
            for i, j in zip(rs, cs):
                code = code * base + i * n + j
            p = pr * pr_urn_seq(c, cs)
            cnt = int(flags[code])
            report.flags.append({
                "rows": list(rs), "cols": list(cs), "count": cnt, "freq": cnt / N,
                "theory": float(p), "z": _binomial_z(cnt, N, float(p)),
            })
    row_freq, col_freq = {}, {}
    for I in combinations(range(m), k):
        im = sum(1 << i for i in I)
        cnt = int(sum(sets[im << n | sum(1 << j for j in J)] for J in combinations(range(n), k)))
        p = float(pr_urn_set(r, I))
        row_freq[I] = cnt / N
        report.row_sets.append({"rows": list(I), "count": cnt, "freq": cnt / N, "theory": p,
                                "z": _binomial_z(cnt, N, p)})
    for J in combinations(range(n), k):
        jm = sum(1 << j for j in J)
        cnt = int(sum(sets[sum(1 << i for i in I) << n | jm] for I in combinations(range(m), k)))
        p = float(pr_urn_set(c, J))
        col_freq[J] = cnt / N
        report.col_sets.append({"cols": list(J), "count": cnt, "freq": cnt / N, "theory": p,
                                "z": _binomial_z(cnt, N, p)})
    for I in combinations(range(m), k):
        im = sum(1 << i for i in I)
        for J in combinations(range(n), k):
            cnt = int(sets[im << n | sum(1 << j for j in J)])
            p = float(pr_urn_set(r, I) * pr_urn_set(c, J))
            indep = row_freq[I] * col_freq[J]
            report.sets.append({
                "rows": list(I), "cols": list(J), "count": cnt, "freq": cnt / N, "theory": p,
                "z": _binomial_z(cnt, N, p),
                "independence_z": _binomial_z(cnt, N, indep),
            })
    return report


@dataclass
class ContributionReport:
    k: int
    cells: dict            # (rows, cols) -> EstimateReport
    total: EstimateReport  # min_k itself

    @property
    def passed(self) -> bool:
        return self.total.passed and all(rep.passed for rep in self.cells.values())

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "total": self.total.to_json(),
            "sum_of_means": sum(rep.mean for rep in self.cells.values()),
            "cells": [
                {"rows": [i + 1 for i in I], "cols": [j + 1 for j in J], **rep.to_json()}
                for (I, J), rep in self.cells.items()
            ],
        }


def estimate_contribution(r, c, k: int, cfg: SampleConfig) -> ContributionReport:
    """Mean of min_k times the indicator of each (k-1)x(k-1) host of the min (k-1)-assignment."""
    r = [Fraction(x) for x in r]
    c = [Fraction(x) for x in c]
    m, n = len(r), len(c)
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} outside 1..{min(m, n)}")
    A = [[ri * cj for cj in c] for ri in r]
    keys = [(I, J) for I in combinations(range(m), k - 1) for J in combinations(range(n), k - 1)]
    lookup = np.full(1 << (m + n), -1, dtype=np.int64)
    for idx, (I, J) in enumerate(keys):
        lookup[sum(1 << i for i in I) << n | sum(1 << j for j in J)] = idx

    def kernel(X):
        v, _, _ = min_k_batch(X, k)
        if k == 1:
            slot = np.zeros(len(v), dtype=np.int64)
        else:
            _, rm, cm = min_k_batch(X, k - 1)
            slot = lookup[rm << n | cm]
        s = np.bincount(slot, weights=v, minlength=len(keys))
        s2 = np.bincount(slot, weights=v * v, minlength=len(keys))
        return s, s2, float(v.sum()), float((v * v).sum())

    s, s2, tot, tot2 = _run(A, cfg, kernel)
    N = cfg.samples
    cells = {
        key: _report(float(s[i]), float(s2[i]), N, contribution(k, r, c, *key))
        for i, key in enumerate(keys)
    }
    return ContributionReport(k, cells, _report(tot, tot2, N, f_main(k, r, c)))


def collapse_rates(A, k: int) -> list[list]:
    """k x k rate matrix whose last row/column aggregate everything beyond the first k-1."""
    m, n = _check_k(A, k)
    t = k - 1
    B = [[A[i][j] for j in range(t)] + [sum((A[i][j] for j in range(t, n)), start=0)]
         for i in range(t)]
    B.append([sum((A[i][j] for i in range(t, m)), start=0) for j in range(t)]
             + [sum((A[i][j] for i in range(t, m) for j in range(t, n)), start=0)])
    return B


@dataclass
class CollapsedReport:
    original: EstimateReport
    collapsed: EstimateReport
    z: float

    @property
    def passed(self) -> bool:
        return (abs(self.z) <= Z_THRESHOLD and self.original.passed
                and self.collapsed.passed)

    def to_json(self) -> dict:
        return {"original": self.original.to_json(), "collapsed": self.collapsed.to_json(),
                "z": self.z}


def _leading_contribution(A, k: int, cfg: SampleConfig, stream: int, target) -> EstimateReport:
    t = k - 1
    lead = (1 << t) - 1
    n = len(A[0])

    def kernel(X):
        v, _, _ = min_k_batch(X, k)
        if t:
            _, rm, cm = min_k_batch(X, t)
            v = np.where((rm == lead) & (cm == lead), v, 0.0)
        return float(v.sum()), float((v * v).sum())

    s, s2 = _run(A, cfg, kernel, stream)
    return _report(s, s2, cfg.samples, target)


def collapsed_rate_check(A, k: int, cfg: SampleConfig) -> CollapsedReport:
    """Compare the leading (k-1)x(k-1) contribution under ``A`` and under its collapse.

    The collapsed matrix reuses ``A``'s random stream only when nothing was
    collapsed (so the two estimates coincide); otherwise it draws from an
    independent stream.
    """
    B = collapse_rates(A, k)
    same = [list(row) for row in A] == B
    target = None
    rc = detect_rank_one(A)
    if rc is not None:
        target = contribution(k, rc[0], rc[1], range(k - 1), range(k - 1))
    a = _leading_contribution(A, k, cfg, 0, target)
    b = _leading_contribution(B, k, cfg, 0 if same else 1, target)
    z = z_score(a.mean, b.mean, math.hypot(a.stderr, b.stderr))
    return CollapsedReport(a, b, z)


def limit_spot_check(k: int, r, c, eps, cfg: SampleConfig) -> dict:
    """Estimate E(k, r, c) with r_0 replaced by ``eps`` (small) next to the limiting formula.

    For k < m the limit as r_0 -> 0 is F(k, r[1:], c); the estimate is scored
    against the exact F at r_0 = eps.  Evidence only: a limit is not
    machine-checkable by sampling.
    """
    r = [Fraction(x) for x in r]
    c = [Fraction(x) for x in c]
    if not 1 <= k < len(r):
        raise DomainError("spot check needs 1 <= k < m")
    r_eps = [Fraction(eps)] + r[1:]
    rep = estimate_e_min([[ri * cj for cj in c] for ri in r_eps], k, cfg,
                         target=f_main(k, r_eps, c))
    limit = f_main(k, r[1:], c)
    return {"estimate": rep.to_json(), "limit": f"{limit.numerator}/{limit.denominator}",
            "limit_float": float(limit)}
