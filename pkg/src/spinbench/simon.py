"""Classical solvers for Simon's problem over GF(2).

Bit vectors are packed little-endian into unsigned 64-bit integers, so
n <= 64 throughout.  Lexicographic comparison of bit tuples (most
significant position first) coincides with numeric comparison of the
packed integers.

The simulated 2-to-1 function is f(x) = g(min(x, x xor p)) for a hidden
period p and a bijection g(x) = A x xor b with A invertible over GF(2);
collisions therefore appear exactly on {x, x xor p} pairs.  Solvers
evaluate f on a set of vectors guaranteed to contain such a pair, sort the
outputs, and scan neighbors: the XOR of any colliding pair of inputs is
the period.

The general solver enumerates every vector supported on one half of the
bit positions; the restricted solver (period Hamming weight <= w) trims
both half-enumerations to vectors with at most w set bits via prefix sums
of binomial coefficients, which is what makes it polynomial in n for fixed
w.  The zero vector belongs to both halves and is enumerated once.
"""

from __future__ import annotations

import math
import threading

import numpy as np

BITVEC_CAP = 64
GENERAL_SOLVER_CAP = 40  # full half-enumeration is 2^(n/2) vectors


def _mask(n: int) -> int:
    return (1 << n) - 1


def gf2_rank(rows, width: int) -> int:
    """Rank over GF(2) of packed matrix rows, by elimination on integers."""
    work = [int(r) for r in rows]
    rank = 0
    for bit in range(width - 1, -1, -1):
        pivot = next(
            (i for i in range(rank, len(work)) if (work[i] >> bit) & 1), None
        )
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and (work[i] >> bit) & 1:
                work[i] ^= work[rank]
        rank += 1
    return rank


class Gf2Matrix:
    """Square bit matrix, each row packed into one integer; row k produces
    output bit k as the parity of (row AND input)."""

    def __init__(self, rows, n: int):
        if not 1 <= n <= BITVEC_CAP:
            raise ValueError(f"n must be in [1, {BITVEC_CAP}]")
        if len(rows) != n:
            raise ValueError("need exactly n rows")
        self.n = n
        self.rows = np.array([int(r) & _mask(n) for r in rows], dtype=np.uint64)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls([1 << k for k in range(n)], n)

    def rank(self) -> int:
        return gf2_rank(self.rows, self.n)

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def apply_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        out = np.zeros(xs.shape, dtype=np.uint64)
        for k in range(self.n):
            bits = (np.bitwise_count(xs & self.rows[k]) & 1).astype(np.uint64)
            out |= bits << np.uint64(k)
        return out

    def apply(self, x: int) -> int:
        return int(self.apply_batch(np.array([x], dtype=np.uint64))[0])


def _random_rows(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 64:
        return rng.integers(0, 1 << n, size=n, dtype=np.uint64)
    lo = rng.integers(0, 1 << 32, size=n, dtype=np.uint64)
    hi = rng.integers(0, 1 << 32, size=n, dtype=np.uint64)
    return (hi << np.uint64(32)) | lo


def random_invertible_gf2(n: int, rng: np.random.Generator) -> Gf2Matrix:
    """Rejection-sample uniform bit matrices until one has full rank.

    The acceptance probability decreases with n but stays above 1/4, so a
    handful of draws suffices.
    """
    while True:
        candidate = Gf2Matrix(_random_rows(n, rng), n)
        if candidate.is_invertible():
            return candidate


class AffineOracle:
    """2-to-1 oracle f(x) = A min(x, x xor p) xor b with a query counter.

    ``period=None`` builds the 1-to-1 variant (f is then the bijection g
    itself).  ``order_key`` optionally replaces the representative choice:
    it maps a batch of packed vectors to sortable keys and must be
    injective; the default is the identity (numeric, i.e. lexicographic,
    order).  The counter is lock-protected so concurrent evaluation batches
    stay correct.
    """

    def __init__(self, matrix: Gf2Matrix, offset: int, period, order_key=None):
        if not matrix.is_invertible():
            raise ValueError("oracle matrix must be invertible over GF(2)")
        self.matrix = matrix
        self.n = matrix.n
        self.offset = int(offset) & _mask(self.n)
        if period is not None:
            period = int(period)
            if period == 0:
                raise ValueError("period 0 is not allowed; use period=None")
            if period >> self.n:
                raise ValueError("period has bits beyond n")
        self.period = period
        self.order_key = order_key
        self.query_count = 0
        self._lock = threading.Lock()

    def evaluate_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        if xs.size and int(xs.max()) >> self.n:
            raise ValueError("input has bits beyond n")
        with self._lock:
            self.query_count += int(xs.size)
        if self.period is None:
            reps = xs
        else:
            partners = xs ^ np.uint64(self.period)
            if self.order_key is None:
                reps = np.minimum(xs, partners)
            else:
                keep = self.order_key(xs) <= self.order_key(partners)
                reps = np.where(keep, xs, partners)
        return self.matrix.apply_batch(reps) ^ np.uint64(self.offset)

    def evaluate(self, x: int) -> int:
        return int(self.evaluate_batch(np.array([x], dtype=np.uint64))[0])


def random_period(n: int, weight: int, rng: np.random.Generator) -> int:
    """Uniform n-bit vector with exactly ``weight`` set bits (weight >= 1)."""
    if not 1 <= weight <= n:
        raise ValueError("weight must be in [1, n]")
    positions = rng.choice(n, size=weight, replace=False)
    p = 0
    for pos in positions:
        p |= 1 << int(pos)
    return p


def random_oracle(n: int, rng: np.random.Generator, period) -> AffineOracle:
    matrix = random_invertible_gf2(n, rng)
    offset = int(_random_rows(1, rng)[0]) & _mask(n)
    return AffineOracle(matrix, offset, period)


class BinomPrefixTable:
    """S(m, k) = sum_{v<=k} C(m, v) for 0 <= m <= n, exact integers.

    Lookups clamp k to m (C(m, v) = 0 beyond the diagonal), so
    S(m, k >= m) = 2^m.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = n
        self._table = []
        for m in range(n + 1):
            acc = 0
            row = []
            for k in range(m + 1):
                acc += math.comb(m, k)
                row.append(acc)
            self._table.append(row)

    def value(self, m: int, k: int) -> int:
        if not 0 <= m <= self.n:
            raise ValueError(f"m={m} outside [0, {self.n}]")
        if k < 0:
            raise ValueError("k must be non-negative")
        return self._table[m][min(k, m)]

    def as_array(self) -> np.ndarray:
        """(n+1, n+1) uint64 view with the clamp baked in; needs n <= 63."""
        if self.n > 63:
            raise ValueError("array export overflows uint64 beyond n=63")
        out = np.zeros((self.n + 1, self.n + 1), dtype=np.uint64)
        for m in range(self.n + 1):
            for k in range(self.n + 1):
                out[m, k] = self._table[m][min(k, m)]
        return out


def ith_constrained_vector(n: int, w: int, i: int, table: BinomPrefixTable) -> int:
    """The i-th n-bit vector, in lexicographic order, among those with at
    most w set bits; a most-significant-first descent on S(n-b, v)."""
    if table.n < n:
        raise ValueError("prefix table too small")
    total = table.value(n, w)
    if not 0 <= i < total:
        raise ValueError(f"i={i} outside [0, {total})")
    x = 0
    v = w
    for b in range(1, n + 1):
        s = table.value(n - b, v)
        if i >= s:
            x |= 1 << (n - b)
            i -= s
            v -= 1
    return x


def constrained_vectors(n: int, w: int, table: BinomPrefixTable) -> np.ndarray:
    """All S(n, w) constrained vectors in lexicographic order (vectorized
    form of the per-index descent)."""
    if n == 0:
        return np.zeros(1, dtype=np.uint64)
    if table.n < n:
        raise ValueError("prefix table too small")
    prefix = table.as_array()
    count = table.value(n, w)
    i = np.arange(count, dtype=np.uint64)
    v = np.full(count, w, dtype=np.int64)
    x = np.zeros(count, dtype=np.uint64)
    for b in range(1, n + 1):
        m = n - b
        s_vals = prefix[m, np.clip(v, 0, None)]
        take = i >= s_vals
        x[take] |= np.uint64(1 << m)
        i[take] -= s_vals[take]
        v[take] -= 1
    return x


def count_restricted_vectors(n: int, w: int, table: BinomPrefixTable | None = None) -> int:
    """v(n, w): combined size of both half-enumerations (the shared zero
    vector counted in each half)."""
    if w > n:
        raise ValueError("w must not exceed n")
    if table is None:
        table = BinomPrefixTable((n + 1) // 2)
    lo = n // 2
    hi = n - lo
    return table.value(lo, min(w, lo)) + table.value(hi, min(w, hi))


def _collision_period(xs: np.ndarray, ys: np.ndarray) -> int:
    order = np.argsort(ys, kind="stable")
    sorted_ys = ys[order]
    equal = np.nonzero(sorted_ys[1:] == sorted_ys[:-1])[0]
    if equal.size == 0:
        return 0
    k = int(equal[0])
    return int(xs[order[k]] ^ xs[order[k + 1]])


def solve_simon_general(n: int, oracle: AffineOracle, cap: int = GENERAL_SOLVER_CAP) -> int:
    """Recover the period by probing all vectors supported on either the
    low floor(n/2) or the high ceil(n/2) bit positions (2^ceil + 2^floor - 1
    evaluations); returns 0 when f has no collision."""
    if n > cap:
        raise ValueError(f"n={n} exceeds general-solver cap {cap}")
    if oracle.n != n:
        raise ValueError("oracle width mismatch")
    lo = n // 2
    hi = n - lo
    xs = np.concatenate(
        [
            np.zeros(1, dtype=np.uint64),
            np.arange(1, 1 << hi, dtype=np.uint64) << np.uint64(lo),
            np.arange(1, 1 << lo, dtype=np.uint64),
        ]
    )
    ys = oracle.evaluate_batch(xs)
    return _collision_period(xs, ys)


def solve_simon_restricted(
    n: int,
    w: int,
    oracle: AffineOracle,
    table: BinomPrefixTable | None = None,
) -> int:
    """Period recovery when the hidden period has Hamming weight <= w.

    Both half-enumerations are restricted to vectors with at most w set
    bits; a period of weight <= w still splits across the halves with each
    part of weight <= w, so a colliding pair is always probed.  Evaluates
    v(n, w) - 1 vectors (the zero vector is deduplicated).  The result is
    undefined when the oracle's period is heavier than w.
    """
    if not 1 <= n <= BITVEC_CAP:
        raise ValueError(f"n must be in [1, {BITVEC_CAP}]")
    if not 0 <= w <= n:
        raise ValueError("w must be in [0, n]")
    if oracle.n != n:
        raise ValueError("oracle width mismatch")
    lo = n // 2
    hi = n - lo
    if table is None:
        table = BinomPrefixTable(hi)
    high_part = constrained_vectors(hi, min(w, hi), table)
    low_part = constrained_vectors(lo, min(w, lo), table) if lo else np.zeros(
        1, dtype=np.uint64
    )
    xs = np.concatenate(
        [
            np.zeros(1, dtype=np.uint64),
            high_part[1:] << np.uint64(lo),
            low_part[1:],
        ]
    )
    ys = oracle.evaluate_batch(xs)
    return _collision_period(xs, ys)
