"""Batched evaluation of bit tables over many parameter assignments.

Two interchangeable backends are provided.  :class:`ReferenceBackend`
evaluates one assignment at a time with Python integers and sequential
folds.  :class:`ParallelBackend` evaluates a chunk of assignments against
every table row at once with int64 numpy arrays: row results are computed
without data-dependent branching (the dummy select aside), terms are reduced
with the doubling-stride scheme of :func:`reduce_strided`, and chunks are
prepared on a worker thread while the previous one is computed.  Both paths
are exact, so their outputs agree bit for bit.
"""

from __future__ import annotations

import operator
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

from .bittable import BitTable
from .phase import parity
from .ring import INT64_MAX, ONE, PHASE_TABLE, ZERO, RingOverflowError, RingQuad

# -- assignments --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AssignmentBatch:
    """Assignment words for ``n`` parameters: bit i of a word is parameter i."""

    n: int
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.ascontiguousarray(self.rows, dtype=np.uint64).reshape(-1)
        object.__setattr__(self, "rows", rows)
        if not 0 <= self.n <= 64:
            raise ValueError("parameter count must lie in [0, 64]")
        if self.n < 64 and rows.size and np.any(rows >> np.uint64(self.n)):
            raise ValueError(f"assignment words have bits above parameter {self.n - 1}")

    def __len__(self) -> int:
        return int(self.rows.size)

    @classmethod
    def from_words(cls, n: int, words: Iterable[int]) -> AssignmentBatch:
        return cls(n, np.fromiter((int(w) for w in words), dtype=np.uint64))

    @classmethod
    def from_bitstrings(cls, n: int, bitstrings: Iterable[str]) -> AssignmentBatch:
        """Bitstrings list parameter values in order: character i is parameter i."""
        words = []
        for s in bitstrings:
            if len(s) != n or set(s) - {"0", "1"}:
                raise ValueError(f"expected a {n}-character bitstring, got {s!r}")
            words.append(sum(1 << i for i, ch in enumerate(s) if ch == "1"))
        return cls.from_words(n, words)

    @classmethod
    def exhaustive(cls, n: int) -> AssignmentBatch:
        if n > 24:
            raise ValueError("exhaustive batches are limited to 24 parameters")
        return cls(n, np.arange(2**n, dtype=np.uint64))


# -- scalar reference pieces ----------------------------------------------------


def eval_row(live: int, k_alpha: int, psi_mask: int, k_beta: int, phi_mask: int, word: int) -> RingQuad:
    """Value of one table row under the assignment ``word``."""
    if not live:
        return ONE
    ia = (k_alpha + 4 * parity(psi_mask & word)) % 8
    ib = (k_beta + 4 * parity(phi_mask & word)) % 8
    return ONE + PHASE_TABLE[ia] + PHASE_TABLE[ib] - PHASE_TABLE[(ia + ib) % 8]


def reduce_strided(values: Sequence, op: Callable = operator.add):
    """Tree reduction with doubling stride.

    Round ``r`` uses gap ``2^r``: every element at an index that is a
    multiple of ``2 * gap`` absorbs its partner ``gap`` places to the right
    (when there is one).  After ``ceil(log2 n)`` rounds the result sits in
    element 0.
    """
    arr = list(values)
    n = len(arr)
    if n == 0:
        raise ValueError("cannot reduce an empty array")
    gap = 1
    while gap < n:
        split = 2 * gap
        for elem in range(0, n - gap, split):
            arr[elem] = op(arr[elem], arr[elem + gap])
        gap = split
    return arr[0]


def _row_fields(table: BitTable, r: int) -> tuple[int, int, int, int, int]:
    return (
        int(table.live[r]),
        int(table.k_alpha[r]),
        int(table.psi_mask[r]),
        int(table.k_beta[r]),
        int(table.phi_mask[r]),
    )


def evaluate(table: BitTable, word: int) -> RingQuad:
    """Evaluate ``table`` at one assignment using strided reductions."""
    if table.m == 0:
        return ZERO
    rows = [_row_fields(table, r) for r in range(table.R)]
    terms = []
    for i in range(table.m):
        vals = [eval_row(*rows[r], word) for r in range(i * table.n_max, (i + 1) * table.n_max)]
        terms.append(reduce_strided(vals, operator.mul) * table.constant(i))
    return reduce_strided(terms, operator.add)


# -- vectorised ring arithmetic ---------------------------------------------------
#
# A ring array is a tuple (a, b, c, d, e) of equally shaped int64 arrays.
# Every operation canonicalises its result.  Before each int64 operation a
# float64 bound is checked; elements that could overflow are recomputed with
# Python integers so that the outcome is exactly the one RingQuad would give.

_LIMIT = float(2**62)
# 2 * e^{ik pi/4} has integer coefficients and a zero denominator exponent
_L2 = np.array([[(v << 1) >> q.exp for v in (q.a, q.b, q.c, q.d)] for q in PHASE_TABLE], dtype=np.int64)


def _canonical(a, b, c, d, e):
    g = a | b | c | d
    zero = g == 0
    low = g & -g
    tz = np.bitwise_count(low - 1).astype(np.int64)
    shift = np.where(zero, 0, np.minimum(tz, e))
    e = np.where(zero, 0, e - shift)
    return a >> shift, b >> shift, c >> shift, d >> shift, e


def _to_quads(x, idx) -> list[RingQuad]:
    a, b, c, d, e = x
    return [RingQuad(int(a[i]), int(b[i]), int(c[i]), int(d[i]), int(e[i])) for i in idx]


def _patch(out, flat_idx, quads) -> None:
    for arr, name in zip(out, ("a", "b", "c", "d", "exp")):
        flat = arr.reshape(-1)
        flat[flat_idx] = [getattr(q, name) for q in quads]


def _exact_fallback(x, y, risky, op):
    idx = np.flatnonzero(risky)
    xs = _to_quads(tuple(np.broadcast_to(v, risky.shape).reshape(-1) for v in x), idx)
    ys = _to_quads(tuple(np.broadcast_to(v, risky.shape).reshape(-1) for v in y), idx)
    return idx, [op(p, q) for p, q in zip(xs, ys)]


def _abs_sum(x):
    a, b, c, d, _ = x
    return np.abs(a).astype(float) + np.abs(b) + np.abs(c) + np.abs(d)


def _max_abs_sum(x) -> float:
    return float(sum(float(np.abs(v).max(initial=0)) for v in x[:4]))


def ring_mul_array(x, y):
    a1, b1, c1, d1, e1 = x
    a2, b2, c2, d2, e2 = y
    # cheap global bound first; the elementwise one only when it fails
    if 2.0 * _max_abs_sum(x) * _max_abs_sum(y) < _LIMIT:
        risky = np.zeros((), dtype=bool)
    else:
        risky = 2.0 * _abs_sum(x) * _abs_sum(y) >= _LIMIT
    out = (
        a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2,
        a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
        a1 * c2 + 2 * b1 * d2 + c1 * a2 + 2 * d1 * b2,
        a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2,
        e1 + e2,
    )
    out = _canonical(*out)
    if np.any(risky):
        out = tuple(np.array(np.broadcast_to(v, risky.shape)) for v in out)
        _patch(out, *_exact_fallback(x, y, risky, operator.mul))
    return out


def ring_add_array(x, y):
    e = np.maximum(x[4], y[4])
    sx, sy = e - x[4], e - y[4]
    bound = _abs_sum(x) * np.exp2(sx) + _abs_sum(y) * np.exp2(sy)
    risky = bound >= _LIMIT
    sx, sy = np.minimum(sx, 62), np.minimum(sy, 62)
    out = tuple((p << sx) + (q << sy) for p, q in zip(x[:4], y[:4])) + (e,)
    out = _canonical(*out)
    if np.any(risky):
        out = tuple(np.array(np.broadcast_to(v, risky.shape)) for v in out)
        _patch(out, *_exact_fallback(x, y, risky, operator.add))
    return out


def reduce_strided_array(x, axis: int, op: Callable):
    """Doubling-stride reduction of a ring array along ``axis``."""
    shape = np.broadcast_shapes(*(v.shape for v in x))
    x = tuple(np.array(np.moveaxis(np.broadcast_to(v, shape), axis, -1)) for v in x)
    n = x[0].shape[-1]
    if n == 0:
        raise ValueError("cannot reduce an empty axis")
    gap = 1
    while gap < n:
        split = 2 * gap
        left = slice(0, n - gap, split)
        right = slice(gap, n, split)
        combined = op(tuple(v[..., left] for v in x), tuple(v[..., right] for v in x))
        for v, nv in zip(x, combined):
            v[..., left] = nv
        gap = split
    return tuple(v[..., 0] for v in x)


def quads_to_array(values: Sequence[RingQuad]):
    arr = np.array([q.coeffs for q in values], dtype=np.int64).reshape(-1, 5)
    return tuple(arr[:, i] for i in range(5))


def array_to_quads(x) -> list[RingQuad]:
    return [RingQuad(int(a), int(b), int(c), int(d), int(e)) for a, b, c, d, e in zip(*x)]


# -- backends -------------------------------------------------------------------


@dataclass(frozen=True)
class Capabilities:
    name: str
    max_rows_in_flight: int
    preferred_batch: int


class Backend(Protocol):
    name: str

    def capabilities(self, table: BitTable | None = None) -> Capabilities: ...

    def evaluate_batch(self, table: BitTable, batch: AssignmentBatch) -> list[RingQuad]: ...


def _check_batch(table: BitTable, batch: AssignmentBatch) -> None:
    if batch.n != table.num_params:
        raise ValueError(f"batch has {batch.n} parameters, table has {table.num_params}")


class ReferenceBackend:
    """Sequential evaluation: one assignment, one row, one fold at a time."""

    name = "ref"

    def capabilities(self, table: BitTable | None = None) -> Capabilities:
        return Capabilities(self.name, 1, 1)

    def evaluate_one(self, table: BitTable, word: int) -> RingQuad:
        total = ZERO
        for i in range(table.m):
            prod = table.constant(i)
            for r in range(i * table.n_max, (i + 1) * table.n_max):
                prod = prod * eval_row(*_row_fields(table, r), word)
            total = total + prod
        return total

    def evaluate_batch(self, table: BitTable, batch: AssignmentBatch) -> list[RingQuad]:
        _check_batch(table, batch)
        return [self.evaluate_one(table, int(w)) for w in batch.rows]


class ParallelBackend:
    """Chunked data-parallel kernel over (assignment x row) work items.

    ``chunk`` is the number of assignments per work unit; by default it is
    sized so that a unit touches about ``max_items`` (assignment, row) pairs.
    """

    name = "parallel"

    def __init__(self, chunk: int | None = None, max_items: int = 1 << 20, workers: int = 2) -> None:
        if chunk is not None and chunk < 1:
            raise ValueError("chunk size must be positive")
        self.chunk = chunk
        self.max_items = max_items
        self.workers = max(1, workers)

    def capabilities(self, table: BitTable | None = None) -> Capabilities:
        rows = max(1, table.R) if table is not None else 1
        preferred = self.chunk or max(1, self.max_items // rows)
        return Capabilities(self.name, preferred * rows, preferred)

    def evaluate_batch(self, table: BitTable, batch: AssignmentBatch) -> list[RingQuad]:
        _check_batch(table, batch)
        words = batch.rows
        if words.size == 0:
            return []
        if table.m == 0:
            return [ZERO] * int(words.size)
        step = self.capabilities(table).preferred_batch
        chunks = [words[i : i + step] for i in range(0, words.size, step)]
        out: list[RingQuad] = []
        # the pool stages the next chunk's row work while the current one reduces
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            for result in pool.map(lambda w: self._evaluate_chunk(table, w), chunks):
                out.extend(result)
        return out

    @staticmethod
    def _evaluate_chunk(table: BitTable, words: np.ndarray) -> list[RingQuad]:
        # first round of each term's strided product comes from the pair table
        per_term = pair_values(table, words)
        prods = reduce_strided_array(per_term, axis=2, op=ring_mul_array)
        consts = tuple(table.constants[None, :, i] for i in range(5))
        weighted = ring_mul_array(prods, consts)
        total = reduce_strided_array(weighted, axis=1, op=ring_add_array)
        return array_to_quads(total)


_LUT_CACHE: "weakref.WeakKeyDictionary[BitTable, np.ndarray]" = weakref.WeakKeyDictionary()
_PAIR_CACHE: "weakref.WeakKeyDictionary[BitTable, np.ndarray]" = weakref.WeakKeyDictionary()


def row_lookup(table: BitTable) -> np.ndarray:
    """Canonical row values for each parity pair: shape ``(5, R, 4)``.

    Entry ``[:, r, x + 2y]`` is row ``r`` when the parities of its two masks
    under an assignment are ``x`` and ``y``; dummy rows hold 1 everywhere.
    """
    lut = _LUT_CACHE.get(table)
    if lut is None:
        x = np.array([0, 1, 0, 1], dtype=np.int64)[None, :]
        y = np.array([0, 0, 1, 1], dtype=np.int64)[None, :]
        ia = (table.k_alpha.astype(np.int64)[:, None] + 4 * x) & 7
        ib = (table.k_beta.astype(np.int64)[:, None] + 4 * y) & 7
        ic = (ia + ib) & 7
        # 2 * (1 + L[ia] + L[ib] - L[ic]) with denominator exponent 1
        coeff = _L2[ia] + _L2[ib] - _L2[ic]
        coeff[..., 0] += 2
        live = table.live.astype(bool)[:, None]
        unit = np.array([1, 0, 0, 0], dtype=np.int64)
        coeff = np.where(live[..., None], coeff, unit)
        e = np.broadcast_to(live, ia.shape).astype(np.int64)
        lut = np.stack(_canonical(*np.moveaxis(coeff, -1, 0), e))
        _LUT_CACHE[table] = lut
    return lut


def row_values(table: BitTable, words: np.ndarray):
    """Ring array of shape ``(len(words), R)`` with every row under every assignment."""
    w = words.astype(np.uint64)[:, None]
    one = np.uint64(1)
    x = np.bitwise_count(table.psi_mask[None, :] & w) & one
    y = np.bitwise_count(table.phi_mask[None, :] & w) & one
    flat = (x + 2 * y).astype(np.intp) + 4 * np.arange(table.R, dtype=np.intp)[None, :]
    lut = row_lookup(table).reshape(5, -1)
    return tuple(lut[i][flat] for i in range(5))


def pair_lookup(table: BitTable) -> np.ndarray:
    """Products of row pairs ``(2j, 2j+1)`` inside each term: shape ``(5, m, P, 16)``.

    ``P = ceil(n_max / 2)``; an odd last row is paired with 1.  Entry
    ``[..., cl + 4*cr]`` combines the parity codes ``cl``, ``cr`` of the two
    rows, so this is exactly the first round of the strided product.
    """
    lut = _PAIR_CACHE.get(table)
    if lut is None:
        rows = row_lookup(table).reshape(5, table.m, table.n_max, 4)
        if table.n_max % 2:
            pad = np.zeros((5, table.m, 1, 4), dtype=np.int64)
            pad[0] = 1
            rows = np.concatenate([rows, pad], axis=2)
        left = tuple(v[:, 0::2, None, :] for v in rows)
        right = tuple(v[:, 1::2, :, None] for v in rows)
        # axis -1 indexes the left code, axis -2 the right one
        prod = ring_mul_array(left, right)
        lut = np.stack([np.broadcast_to(v, prod[0].shape).reshape(table.m, -1, 16) for v in prod])
        _PAIR_CACHE[table] = lut
    return lut


def pair_values(table: BitTable, words: np.ndarray):
    """Ring array of shape ``(len(words), m, P)``: each term's row pairs multiplied."""
    w = words.astype(np.uint64)[:, None]
    one = np.uint64(1)
    x = np.bitwise_count(table.psi_mask[None, :] & w) & one
    y = np.bitwise_count(table.phi_mask[None, :] & w) & one
    code = (x + 2 * y).astype(np.intp).reshape(words.size, table.m, table.n_max)
    if table.n_max % 2:
        code = np.concatenate([code, np.zeros((words.size, table.m, 1), dtype=np.intp)], axis=2)
    pair_code = code[:, :, 0::2] + 4 * code[:, :, 1::2]
    P = pair_code.shape[2]
    flat = pair_code + 16 * np.arange(table.m * P, dtype=np.intp).reshape(1, table.m, P)
    lut = pair_lookup(table).reshape(5, -1)
    return tuple(lut[i][flat] for i in range(5))


def get_backend(name: str, chunk: int | None = None) -> Backend:
    if name == "ref":
        return ReferenceBackend()
    if name == "parallel":
        return ParallelBackend(chunk=chunk)
    raise ValueError(f"unknown backend {name!r}")


def evaluate_batch(table: BitTable, batch: AssignmentBatch, backend: Backend | None = None) -> list[RingQuad]:
    return (backend or ParallelBackend()).evaluate_batch(table, batch)


__all__ = [
    "INT64_MAX",
    "RingOverflowError",
    "AssignmentBatch",
    "Backend",
    "Capabilities",
    "ParallelBackend",
    "ReferenceBackend",
    "eval_row",
    "evaluate",
    "evaluate_batch",
    "get_backend",
    "pair_lookup",
    "pair_values",
    "reduce_strided",
    "reduce_strided_array",
    "row_values",
]
