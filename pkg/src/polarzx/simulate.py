"""Strong amplitudes, marginal probabilities and repeated weak sampling."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bittable import BitTable, compile_bit_table
from .build import diagram_from_circuit, double_diagram
from .circuit import Circuit, CircuitError
from .decompose import DecompositionStats, decompose_to_scalar
from .diagram import ZXDiagram
from .kernel import AssignmentBatch, Backend, ParallelBackend
from .ring import ZERO, RingQuad
from .scalar import ScalarExpression, assignment_word

MAX_SUMMED_QUBITS = 20


class SamplingError(RuntimeError):
    pass


@dataclass
class Compiled:
    """A closed diagram reduced to an expression and packed into a table."""

    expression: ScalarExpression
    table: BitTable
    stats: DecompositionStats
    seconds: float

    @property
    def params(self) -> tuple[str, ...]:
        return self.expression.param_names

    def word(self, assignment) -> int:
        return assignment_word(self.params, assignment)

    def evaluate(self, words: Sequence[int] | np.ndarray, backend: Backend | None = None) -> list[RingQuad]:
        batch = AssignmentBatch(len(self.params), np.asarray(words, dtype=np.uint64))
        return (backend or ParallelBackend()).evaluate_batch(self.table, batch)


def compile_diagram(d: ZXDiagram, trace=None) -> Compiled:
    start = time.perf_counter()
    stats = DecompositionStats()
    expr = decompose_to_scalar(d, trace=trace, stats=stats)
    table = compile_bit_table(expr)
    return Compiled(expr, table, stats, time.perf_counter() - start)


def _circuit_params(c: Circuit, params: Mapping[str, int]) -> dict[str, int]:
    missing = [p for p in c.param_names if p not in params]
    if missing:
        raise CircuitError(f"no values given for circuit parameters {missing}")
    return {p: params[p] for p in c.param_names}


def strong_amplitude(
    c: Circuit,
    in_bits: Sequence[int],
    out_bits: Sequence[int],
    params: Mapping[str, int] = {},
    backend: Backend | None = None,
) -> complex:
    """``<out|U|in>`` through the full compile-and-evaluate pipeline."""
    for b in list(in_bits) + list(out_bits):
        if b not in (0, 1):
            raise CircuitError("strong simulation needs fully specified 0/1 bits")
    values = _circuit_params(c, params)
    compiled = compile_diagram(diagram_from_circuit(c, list(in_bits), list(out_bits)))
    (value,) = compiled.evaluate([compiled.word(values)], backend)
    return value.to_complex()


@dataclass(frozen=True)
class MarginalSpec:
    """Fixed output qubits (bit or parameter name) of an ``n``-qubit register."""

    n: int
    fixed: Mapping[int, int | str]

    def __post_init__(self) -> None:
        for q, b in self.fixed.items():
            if not 0 <= q < self.n:
                raise CircuitError(f"qubit {q} out of range for {self.n} qubits")
            if not (b in (0, 1) or isinstance(b, str)):
                raise CircuitError(f"marginal value for qubit {q} must be 0, 1 or a parameter name, got {b!r}")

    @property
    def dont_care(self) -> list[int]:
        return [q for q in range(self.n) if q not in self.fixed]

    def resolve(self, params: Mapping[str, int] = {}) -> dict[int, int]:
        out = {}
        for q, b in sorted(self.fixed.items()):
            if isinstance(b, str):
                if b not in params:
                    raise CircuitError(f"no value given for marginal parameter {b!r}")
                b = params[b]
            out[q] = int(b)
        return out


def _fixed_bits(c: Circuit, fixed, params: Mapping[str, int]) -> dict[int, int]:
    spec = fixed if isinstance(fixed, MarginalSpec) else MarginalSpec(c.n_qubits, dict(fixed))
    if spec.n != c.n_qubits:
        raise CircuitError(f"marginal spec is for {spec.n} qubits, circuit has {c.n_qubits}")
    return spec.resolve(params)


def _probability(values: Sequence[RingQuad]) -> float:
    total = ZERO
    for v in values:
        total = total + v
    z = total.to_complex()
    return z.real


def marginal_summing(
    c: Circuit, fixed: MarginalSpec | Mapping[int, int | str], params: Mapping[str, int] = {}, backend: Backend | None = None
) -> float:
    """``sum_b |<a b|U|0>|^2`` with every don't-care output parameterised."""
    fixed = _fixed_bits(c, fixed, params)
    free = [q for q in range(c.n_qubits) if q not in fixed]
    if len(free) > MAX_SUMMED_QUBITS:
        raise CircuitError(f"summing over {len(free)} qubits exceeds the limit of {MAX_SUMMED_QUBITS}")
    values = _circuit_params(c, params)
    outs = [fixed[q] if q in fixed else f"out{q}" for q in range(c.n_qubits)]
    compiled = compile_diagram(diagram_from_circuit(c, [0] * c.n_qubits, outs))
    free_idx = [compiled.params.index(f"out{q}") for q in free]
    base = compiled.word(values | {f"out{q}": 0 for q in free})
    words = np.full(2 ** len(free), base, dtype=np.uint64)
    combos = np.arange(2 ** len(free), dtype=np.uint64)
    for j, idx in enumerate(free_idx):
        words |= ((combos >> np.uint64(j)) & np.uint64(1)) << np.uint64(idx)
    amps = compiled.evaluate(words, backend)
    return _probability([a * a.conj() for a in amps])


class DoublingMarginal:
    """Marginals of a fixed set of qubits, compiled once with parametric bits."""

    def __init__(self, c: Circuit, qubits: Sequence[int], trace=None) -> None:
        self.circuit = c
        self.qubits = sorted(qubits)
        for q in self.qubits:
            if not 0 <= q < c.n_qubits:
                raise CircuitError(f"qubit {q} out of range for {c.n_qubits} qubits")
        self.diagram = double_diagram(c, {q: f"a{q}" for q in self.qubits})
        self.compiled = compile_diagram(self.diagram, trace)

    def words(self, patterns: np.ndarray, params: Mapping[str, int] = {}) -> np.ndarray:
        """Assignment words for ``patterns[i, j]`` = bit of ``qubits[j]`` in sample i."""
        values = _circuit_params(self.circuit, params)
        base = self.compiled.word(values | {f"a{q}": 0 for q in self.qubits})
        patterns = np.asarray(patterns, dtype=np.uint64)
        if patterns.ndim != 2:
            patterns = patterns.reshape(-1, len(self.qubits))
        if patterns.shape[1] != len(self.qubits):
            raise CircuitError(f"patterns need {len(self.qubits)} columns, got {patterns.shape[1]}")
        words = np.full(patterns.shape[0], base, dtype=np.uint64)
        for j, q in enumerate(self.qubits):
            words |= patterns[:, j] << np.uint64(self.compiled.params.index(f"a{q}"))
        return words

    def probabilities(self, patterns, params: Mapping[str, int] = {}, backend: Backend | None = None) -> list[RingQuad]:
        return self.compiled.evaluate(self.words(patterns, params), backend)


def marginal_doubling(
    c: Circuit, fixed: MarginalSpec | Mapping[int, int | str], params: Mapping[str, int] = {}, backend: Backend | None = None
) -> float:
    """``<0|U^dag (|a><a| (x) I) U|0>`` via the doubled diagram."""
    fixed = _fixed_bits(c, fixed, params)
    qubits = sorted(fixed)
    m = DoublingMarginal(c, qubits)
    (p,) = m.probabilities(np.array([[fixed[q] for q in qubits]]), params, backend)
    return _probability([p])


@dataclass
class WeakSampler:
    """Repeated weak simulation by the chain rule over qubit prefixes.

    Round ``k`` compiles the doubled diagram for qubits ``0..k`` once and
    evaluates ``P(prefix, 0)`` for every sample.  The next bit is 0 with
    probability ``P(prefix, 0) / P(prefix)``; with ``literal=True`` the
    unnormalised ``P(prefix, 0)`` is used as the threshold instead.
    """

    circuit: Circuit
    params: Mapping[str, int] = field(default_factory=dict)
    backend: Backend | None = None
    literal: bool = False
    rounds: list[DoublingMarginal] = field(default_factory=list)

    @property
    def compilations(self) -> int:
        return len(self.rounds)

    def _round(self, k: int) -> DoublingMarginal:
        while len(self.rounds) <= k:
            self.rounds.append(DoublingMarginal(self.circuit, range(len(self.rounds) + 1)))
        return self.rounds[k]

    def sample(self, n_samples: int, seed: int | None = None) -> list[str]:
        if n_samples < 1:
            raise ValueError("need at least one sample")
        n = self.circuit.n_qubits
        rng = np.random.Generator(np.random.Philox(seed))
        bits = np.zeros((n_samples, n), dtype=np.uint64)
        prefix_prob: list[RingQuad] = [RingQuad(1)] * n_samples
        for k in range(n):
            marginal = self._round(k)
            p0 = marginal.probabilities(bits[:, : k + 1], self.params, self.backend)
            draws = rng.random(n_samples)
            for i in range(n_samples):
                prev = prefix_prob[i]
                if prev.is_zero():
                    raise SamplingError(f"sample {i} reached a zero-probability prefix at qubit {k}")
                p = p0[i].to_complex().real
                threshold = p if self.literal else p / prev.to_complex().real
                if draws[i] < threshold:
                    prefix_prob[i] = p0[i]
                else:
                    bits[i, k] = 1
                    prefix_prob[i] = prev - p0[i]
        return ["".join(str(int(b)) for b in row) for row in bits]


def weak_sample(
    c: Circuit,
    n_samples: int,
    seed: int | None = None,
    params: Mapping[str, int] = {},
    backend: Backend | None = None,
    literal: bool = False,
) -> list[str]:
    """Draw ``n_samples`` measurement outcomes of ``U|0..0>`` (qubit 0 first)."""
    return WeakSampler(c, params, backend, literal).sample(n_samples, seed)
