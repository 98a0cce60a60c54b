"""Translate circuits into ZX-diagrams."""

from __future__ import annotations

from typing import Mapping, Sequence, Union

from .circuit import PARAM_GATES, Circuit, CircuitError
from .diagram import EdgeType, VertexKind, ZXDiagram
from .phase import ParamPhase
from .ring import INV_SQRT2, SQRT2_Q

# a wire end is a fixed bit, a parameter name, or None for an open boundary
WireSpec = Union[int, str, None]


class _WireBuilder:
    """Lays gates down on per-qubit wires, tracking pending Hadamards."""

    def __init__(self, d: ZXDiagram, n_qubits: int) -> None:
        self.d = d
        self.last: list[int | None] = [None] * n_qubits
        self.had = [False] * n_qubits

    def start(self, q: int, spec: WireSpec) -> None:
        self.last[q] = self._terminal(spec, is_input=True)
        self.had[q] = False

    def finish(self, q: int, spec: WireSpec) -> None:
        self.attach(q, self._terminal(spec, is_input=False))

    def _terminal(self, spec: WireSpec, is_input: bool) -> int:
        d = self.d
        if spec is None:
            v = d.add_vertex(VertexKind.BOUNDARY)
            (d.inputs if is_input else d.outputs).append(v)
            return v
        if isinstance(spec, str):
            phase = d.param_phase(0, [spec])
        elif spec in (0, 1):
            phase = ParamPhase(4 * spec)
        else:
            raise CircuitError(f"wire bit must be 0, 1, a parameter name or None, got {spec!r}")
        d.mul_scalar(INV_SQRT2)
        return d.add_spider(VertexKind.X, phase)

    def attach(self, q: int, v: int) -> None:
        et = EdgeType.HADAMARD if self.had[q] else EdgeType.SIMPLE
        self.d.add_edge(self.last[q], v, et)
        self.had[q] = False
        self.last[q] = v

    def gate(self, g) -> None:
        d = self.d
        if g.name == "h":
            (q,) = g.qubits
            self.had[q] = not self.had[q]
        elif g.name == "x":
            self.attach(g.qubits[0], d.add_spider(VertexKind.X, ParamPhase(4)))
        elif g.name in PARAM_GATES:
            kind = VertexKind.X if g.name == "param_x" else VertexKind.Z
            self.attach(g.qubits[0], d.add_spider(kind, d.param_phase(0, [g.param])))
        elif g.name in ("cx", "cz"):
            c, t = g.qubits
            vc = d.add_spider(VertexKind.Z)
            vt = d.add_spider(VertexKind.X if g.name == "cx" else VertexKind.Z)
            self.attach(c, vc)
            self.attach(t, vt)
            d.add_edge(vc, vt, EdgeType.SIMPLE if g.name == "cx" else EdgeType.HADAMARD)
            d.mul_scalar(SQRT2_Q)
        else:
            self.attach(g.qubits[0], d.add_spider(VertexKind.Z, ParamPhase(g.phase_k)))


def _check_len(specs: Sequence, n: int, what: str) -> None:
    if len(specs) != n:
        raise CircuitError(f"{what} lists {len(specs)} wires for a {n}-qubit circuit")


def diagram_from_circuit(
    c: Circuit,
    in_bits: Sequence[WireSpec] | None = None,
    out_bits: Sequence[WireSpec] | None = None,
) -> ZXDiagram:
    """Diagram of ``<out| U |in>``.

    Each wire end is ``0``/``1`` (a plugged basis state / effect), a parameter
    name (a parametric basis state) or ``None`` (an open boundary).  Omitted
    lists mean all-open.  Parameters are declared in the order: circuit
    insertions, input wires, output wires.
    """
    n = c.n_qubits
    in_bits = [None] * n if in_bits is None else list(in_bits)
    out_bits = [None] * n if out_bits is None else list(out_bits)
    _check_len(in_bits, n, "input")
    _check_len(out_bits, n, "output")
    d = ZXDiagram(c.param_names)
    w = _WireBuilder(d, n)
    for q in range(n):
        w.start(q, in_bits[q])
    for g in c.gates:
        w.gate(g)
    for q in range(n):
        w.finish(q, out_bits[q])
    return d


def double_diagram(c: Circuit, fixed: Mapping[int, int | str]) -> ZXDiagram:
    """Closed diagram of ``<0| U^dag (|a><a| (x) I) U |0>`` for the qubits in ``fixed``.

    A parametric entry uses the same parameter in both the projector's bra
    and ket, so the result is the marginal probability of ``a`` as a
    function of the parameters.
    """
    n = c.n_qubits
    for q, spec in fixed.items():
        if not 0 <= q < n:
            raise CircuitError(f"qubit {q} out of range for {n} qubits")
        if not (isinstance(spec, str) or spec in (0, 1)):
            raise CircuitError(f"marginal bit must be 0, 1 or a parameter name, got {spec!r}")
    d = ZXDiagram(c.param_names)
    w = _WireBuilder(d, n)
    for q in range(n):
        w.start(q, 0)
    for g in c.gates:
        w.gate(g)
    for q in sorted(fixed):
        w.finish(q, fixed[q])
        w.start(q, fixed[q])
    for g in c.adjoint().gates:
        w.gate(g)
    for q in range(n):
        w.finish(q, 0)
    return d
