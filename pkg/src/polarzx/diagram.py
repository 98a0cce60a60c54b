"""ZX-diagrams over polarised phases, with a dense tensor-contraction oracle."""

from __future__ import annotations

import json
from enum import IntEnum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .phase import MAX_PARAMS, MissingParameterError, ParamPhase, instantiate_phase, mask_from_indices, mask_indices
from .ring import ONE, RingQuad
from .scalar import Subterm, SubtermKind, assignment_word


class VertexKind(IntEnum):
    BOUNDARY = 0
    Z = 1
    X = 2


class EdgeType(IntEnum):
    SIMPLE = 1
    HADAMARD = 2


_EDGE_TAGS = {EdgeType.SIMPLE: "s", EdgeType.HADAMARD: "h"}
_KIND_TAGS = {VertexKind.Z: "Z", VertexKind.X: "X", VertexKind.BOUNDARY: "B"}
_ZERO_PHASE = ParamPhase()


class DiagramError(ValueError):
    pass


class DiagramTooLarge(DiagramError):
    pass


class ZXDiagram:
    """Undirected multigraph of Z/X spiders and boundary vertices.

    Parallel edges are stored as ``(n_simple, n_hadamard)`` counts per vertex
    pair; self-loops are kept apart in ``loops``.  Boundary vertices carry no
    phase and sit in ``inputs`` / ``outputs``.  The diagram's value is
    ``scalar * prod(pending) * <graph>``: parameter-free scalar factors are
    folded into ``scalar`` as soon as they appear, parametric ones wait in
    ``pending``.
    """

    __slots__ = ("_kind", "_phase", "_adj", "_loops", "inputs", "outputs", "scalar", "pending", "params", "_next")

    def __init__(self, params: Sequence[str] = ()) -> None:
        self._kind: dict[int, VertexKind] = {}
        self._phase: dict[int, ParamPhase] = {}
        self._adj: dict[int, dict[int, tuple[int, int]]] = {}
        self._loops: dict[int, tuple[int, int]] = {}
        self.inputs: list[int] = []
        self.outputs: list[int] = []
        self.scalar: RingQuad = ONE
        self.pending: list[Subterm] = []
        self.params: list[str] = list(params)
        self._next = 0
        if len(self.params) > MAX_PARAMS:
            raise DiagramError(f"at most {MAX_PARAMS} parameters are supported")

    # -- parameters ---------------------------------------------------------

    def param_index(self, name: str) -> int:
        """Index of ``name``, declaring it if it is new."""
        try:
            return self.params.index(name)
        except ValueError:
            if len(self.params) >= MAX_PARAMS:
                raise DiagramError(f"at most {MAX_PARAMS} parameters are supported") from None
            self.params.append(name)
            return len(self.params) - 1

    def param_phase(self, k: int, names: Iterable[str] = ()) -> ParamPhase:
        return ParamPhase(k, mask_from_indices(self.param_index(n) for n in names))

    # -- vertices -----------------------------------------------------------

    def add_vertex(self, kind: VertexKind, phase: ParamPhase = _ZERO_PHASE, vid: int | None = None) -> int:
        if vid is None:
            vid = self._next
        elif vid in self._kind:
            raise DiagramError(f"vertex {vid} already exists")
        self._next = max(self._next, vid + 1)
        self._kind[vid] = VertexKind(kind)
        self._phase[vid] = _ZERO_PHASE if kind == VertexKind.BOUNDARY else phase
        self._adj[vid] = {}
        return vid

    def add_spider(self, kind: VertexKind, phase: ParamPhase = _ZERO_PHASE) -> int:
        if kind == VertexKind.BOUNDARY:
            raise DiagramError("use add_vertex for boundaries")
        return self.add_vertex(kind, phase)

    def remove_vertex(self, v: int) -> None:
        for w in self._adj.pop(v):
            if w != v:
                del self._adj[w][v]
        self._loops.pop(v, None)
        del self._kind[v]
        del self._phase[v]
        if v in self.inputs:
            self.inputs.remove(v)
        if v in self.outputs:
            self.outputs.remove(v)

    def kind(self, v: int) -> VertexKind:
        return self._kind[v]

    def set_kind(self, v: int, kind: VertexKind) -> None:
        self._kind[v] = kind

    def phase(self, v: int) -> ParamPhase:
        return self._phase[v]

    def set_phase(self, v: int, phase: ParamPhase) -> None:
        self._phase[v] = phase

    def add_to_phase(self, v: int, phase: ParamPhase) -> None:
        self._phase[v] = self._phase[v] + phase

    def is_boundary(self, v: int) -> bool:
        return self._kind[v] == VertexKind.BOUNDARY

    def vertices(self) -> list[int]:
        return list(self._kind)

    def spiders(self) -> list[int]:
        return [v for v, t in self._kind.items() if t != VertexKind.BOUNDARY]

    def __contains__(self, v: int) -> bool:
        return v in self._kind

    @property
    def num_vertices(self) -> int:
        return len(self._kind)

    @property
    def num_spiders(self) -> int:
        return sum(1 for t in self._kind.values() if t != VertexKind.BOUNDARY)

    @property
    def is_closed(self) -> bool:
        return not self.inputs and not self.outputs

    def tcount(self) -> int:
        return sum(1 for v, t in self._kind.items() if t != VertexKind.BOUNDARY and self._phase[v].k & 1)

    # -- edges --------------------------------------------------------------

    def edge_counts(self, u: int, v: int) -> tuple[int, int]:
        if u == v:
            return self._loops.get(u, (0, 0))
        return self._adj[u].get(v, (0, 0))

    def set_edge_counts(self, u: int, v: int, simple: int, had: int) -> None:
        if simple < 0 or had < 0:
            raise DiagramError("negative edge multiplicity")
        if u == v:
            if simple or had:
                self._loops[u] = (simple, had)
            else:
                self._loops.pop(u, None)
            return
        if simple or had:
            self._adj[u][v] = self._adj[v][u] = (simple, had)
        elif v in self._adj[u]:
            del self._adj[u][v]
            del self._adj[v][u]

    def add_edge(self, u: int, v: int, et: EdgeType = EdgeType.SIMPLE, count: int = 1) -> None:
        s, h = self.edge_counts(u, v)
        if et == EdgeType.SIMPLE:
            self.set_edge_counts(u, v, s + count, h)
        else:
            self.set_edge_counts(u, v, s, h + count)

    def remove_edge(self, u: int, v: int, et: EdgeType = EdgeType.SIMPLE) -> None:
        s, h = self.edge_counts(u, v)
        if et == EdgeType.SIMPLE:
            self.set_edge_counts(u, v, s - 1, h)
        else:
            self.set_edge_counts(u, v, s, h - 1)

    def neighbors(self, v: int) -> Iterable[int]:
        return self._adj[v].keys()

    def incident(self, v: int) -> Iterator[tuple[int, tuple[int, int]]]:
        return iter(self._adj[v].items())

    def degree(self, v: int) -> int:
        deg = sum(s + h for s, h in self._adj[v].values())
        s, h = self._loops.get(v, (0, 0))
        return deg + 2 * (s + h)

    def has_loops(self, v: int | None = None) -> bool:
        return bool(self._loops) if v is None else v in self._loops

    def loops(self) -> dict[int, tuple[int, int]]:
        return dict(self._loops)

    def edges(self) -> Iterator[tuple[int, int, int, int]]:
        """Yield ``(u, v, n_simple, n_hadamard)`` once per connected pair (u <= v)."""
        for u, nb in self._adj.items():
            for v, (s, h) in nb.items():
                if u < v:
                    yield u, v, s, h
        for u, (s, h) in self._loops.items():
            yield u, u, s, h

    @property
    def num_edges(self) -> int:
        return sum(s + h for _, _, s, h in self.edges())

    # -- scalars ------------------------------------------------------------

    def mul_scalar(self, factor: RingQuad) -> None:
        self.scalar = self.scalar * factor

    def emit(self, subterm: Subterm) -> None:
        """Absorb a scalar subterm: fold it if parameter-free, else defer it."""
        if subterm.is_constant:
            self.scalar = self.scalar * subterm.evaluate(0)
        else:
            self.pending.append(subterm)

    # -- whole-diagram operations ------------------------------------------

    def copy(self) -> ZXDiagram:
        d = ZXDiagram.__new__(ZXDiagram)
        d._kind = self._kind.copy()
        d._phase = self._phase.copy()
        d._adj = {v: nb.copy() for v, nb in self._adj.items()}
        d._loops = self._loops.copy()
        d.inputs = self.inputs.copy()
        d.outputs = self.outputs.copy()
        d.scalar = self.scalar
        d.pending = self.pending.copy()
        d.params = self.params.copy()
        d._next = self._next
        return d

    def used_mask(self) -> int:
        mask = 0
        for p in self._phase.values():
            mask |= p.mask
        for s in self.pending:
            mask |= s.mask
        return mask

    @property
    def is_parametric(self) -> bool:
        return self.used_mask() != 0

    def relabel(self, mapping: dict[int, int]) -> ZXDiagram:
        """Return an isomorphic copy with vertex ids renamed by ``mapping``."""
        d = ZXDiagram(self.params)
        for v in self._kind:
            d.add_vertex(self._kind[v], self._phase[v], mapping[v])
        for u, v, s, h in self.edges():
            d.set_edge_counts(mapping[u], mapping[v], s, h)
        d.inputs = [mapping[v] for v in self.inputs]
        d.outputs = [mapping[v] for v in self.outputs]
        d.scalar = self.scalar
        d.pending = self.pending.copy()
        return d

    def to_dict(self) -> dict:
        names = self.params

        def phase_entry(p: ParamPhase) -> list[str]:
            return [names[i] for i in mask_indices(p.mask)]

        spiders = [
            {"id": v, "kind": _KIND_TAGS[t], "k": self._phase[v].k, "mask": phase_entry(self._phase[v])}
            for v, t in self._kind.items()
        ]
        edges = []
        for u, v, s, h in self.edges():
            edges += [[u, v, "s"]] * s + [[u, v, "h"]] * h
        return {
            "params": list(names),
            "spiders": spiders,
            "edges": edges,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "scalar": self.scalar.to_dict(),
            "pending": [s.to_list() for s in self.pending],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ZXDiagram:
        d = cls(data.get("params", ()))
        kinds = {tag: kind for kind, tag in _KIND_TAGS.items()}
        try:
            for sp in data["spiders"]:
                kind = kinds[sp["kind"]]
                d.add_vertex(kind, d.param_phase(sp.get("k", 0), sp.get("mask", ())), int(sp["id"]))
            for u, v, tag in data.get("edges", ()):
                if tag not in ("s", "h"):
                    raise DiagramError(f"unknown edge tag {tag!r}")
                d.add_edge(int(u), int(v), EdgeType.SIMPLE if tag == "s" else EdgeType.HADAMARD)
            d.inputs = [int(v) for v in data.get("inputs", ())]
            d.outputs = [int(v) for v in data.get("outputs", ())]
            if "scalar" in data:
                d.scalar = RingQuad.from_dict(data["scalar"])
            for kind, k1, m1, k2, m2 in data.get("pending", ()):
                d.pending.append(Subterm(SubtermKind(kind), ParamPhase(k1, m1), ParamPhase(k2, m2)))
        except (KeyError, TypeError) as exc:
            raise DiagramError(f"malformed diagram: {exc}") from exc
        for v in d.inputs + d.outputs:
            if v not in d or not d.is_boundary(v):
                raise DiagramError(f"boundary list names non-boundary vertex {v}")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> ZXDiagram:
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return (
            f"ZXDiagram(spiders={self.num_spiders}, edges={self.num_edges}, "
            f"inputs={len(self.inputs)}, outputs={len(self.outputs)}, t={self.tcount()})"
        )


def instantiate_diagram(d: ZXDiagram, assignment) -> ZXDiagram:
    """Resolve every parameter of ``d``; pending subterms fold into the scalar.

    ``assignment`` is an int word, a bit sequence in ``d.params`` order or a
    name -> bit mapping.
    """
    bits = assignment_word(d.params, assignment)
    out = d.copy()
    for v in d.spiders():
        p = d.phase(v)
        if p.mask:
            out.set_phase(v, ParamPhase(instantiate_phase(p, bits)))
    scalar = d.scalar
    for s in d.pending:
        scalar = scalar * s.evaluate(bits)
    out.scalar = scalar
    out.pending = []
    return out


# -- dense semantics -------------------------------------------------------

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_OMEGA = np.exp(1j * np.pi / 4 * np.arange(8))


def spider_tensor(kind: VertexKind, k: int, arity: int) -> np.ndarray:
    if kind == VertexKind.Z:
        t = np.zeros((2,) * arity, dtype=complex)
        if arity == 0:
            return np.array(1.0 + _OMEGA[k % 8])
        t[(0,) * arity] = 1.0
        t[(1,) * arity] += _OMEGA[k % 8]
        return t
    # Hadamard conjugate of the Z spider: 2^{-n/2} (1 + e^{ia} (-1)^{|x|})
    weights = np.ones((2,) * arity)
    for axis in range(arity):
        shape = [1] * arity
        shape[axis] = 2
        weights = weights * np.array([1.0, -1.0]).reshape(shape)
    return (1.0 + _OMEGA[k % 8] * weights) * 2.0 ** (-arity / 2)


def dense_semantics(d: ZXDiagram, max_legs: int = 12, max_elements: int = 1 << 22) -> np.ndarray:
    """Contract ``d`` to a ``2^outputs x 2^inputs`` matrix.

    Rows index output bitstrings and columns input bitstrings, with the first
    wire as the most significant bit.  Raises :class:`DiagramTooLarge` when
    more than ``max_legs`` wires are open or an intermediate tensor would
    exceed ``max_elements`` entries.
    """
    if d.used_mask():
        raise DiagramError("dense semantics needs a parameter-free diagram; instantiate it first")
    open_legs = len(d.inputs) + len(d.outputs)
    if open_legs > max_legs:
        raise DiagramTooLarge(f"{open_legs} open wires exceed the limit of {max_legs}")

    next_label = 0

    def fresh() -> int:
        nonlocal next_label
        next_label += 1
        return next_label - 1

    legs: dict[int, list[int]] = {v: [] for v in d.vertices()}
    tensors: list[tuple[np.ndarray, list[int]]] = []
    for u, v, s, h in d.edges():
        if u == v:
            for _ in range(h):
                a, b = fresh(), fresh()
                legs[u] += [a, b]
                tensors.append((_H, [a, b]))
            continue
        both_boundary = d.is_boundary(u) and d.is_boundary(v)
        for _ in range(s):
            if both_boundary:
                a, b = fresh(), fresh()
                tensors.append((np.eye(2), [a, b]))
            else:
                a = b = fresh()
            legs[u].append(a)
            legs[v].append(b)
        for _ in range(h):
            a, b = fresh(), fresh()
            tensors.append((_H, [a, b]))
            legs[u].append(a)
            legs[v].append(b)

    open_label: dict[int, int] = {}
    for v in d.vertices():
        if d.is_boundary(v):
            if len(legs[v]) != 1 or d.has_loops(v):
                raise DiagramError(f"boundary vertex {v} must have degree 1")
            open_label[v] = legs[v][0]
            continue
        arity = len(legs[v])
        if arity > 24:
            raise DiagramTooLarge(f"spider {v} has arity {arity}")
        tensors.append((spider_tensor(d.kind(v), d.phase(v).k, arity), legs[v]))

    result, labels = _contract(tensors, max_elements)
    order = [open_label[v] for v in d.outputs + d.inputs]
    if sorted(order) != sorted(labels):
        raise DiagramError("diagram has dangling vertices outside the boundary lists")
    result = np.transpose(result, [labels.index(x) for x in order]) if order else result
    matrix = np.asarray(result, dtype=complex).reshape(2 ** len(d.outputs), 2 ** len(d.inputs))
    scalar = d.scalar.to_complex()
    for s in d.pending:
        scalar *= s.evaluate(0).to_complex()
    return matrix * scalar


def _contract(tensors, max_elements):
    """Greedy pairwise contraction, always choosing the smallest result."""
    pool = dict(enumerate(tensors))
    holders: dict[int, list[int]] = {}
    for tid, (_, labels) in pool.items():
        for x in labels:
            holders.setdefault(x, []).append(tid)
    next_id = len(pool)

    while True:
        best = None
        for x, hs in holders.items():
            if len(hs) != 2 or hs[0] == hs[1]:
                continue
            i, j = hs
            li, lj = pool[i][1], pool[j][1]
            shared = set(li) & set(lj)
            size = len(li) + len(lj) - 2 * len(shared)
            if best is None or size < best[0]:
                best = (size, i, j, shared)
        if best is None:
            break
        size, i, j, shared = best
        if 2**size > max_elements:
            raise DiagramTooLarge(f"intermediate tensor with {size} legs")
        (a, la), (b, lb) = pool.pop(i), pool.pop(j)
        ax_a = [la.index(x) for x in shared]
        ax_b = [lb.index(x) for x in shared]
        c = np.tensordot(a, b, axes=(ax_a, ax_b))
        lc = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
        for x in shared:
            del holders[x]
        for x in lc:
            holders[x] = [next_id if t in (i, j) else t for t in holders[x]]
        pool[next_id] = (c, lc)
        next_id += 1

    # disconnected pieces: outer products, smallest first
    pieces = sorted(pool.values(), key=lambda t: np.size(t[0]))
    result, labels = np.array(1.0 + 0j), []
    for arr, la in pieces:
        if len(labels) + len(la) > 0 and 2 ** (len(labels) + len(la)) > max_elements:
            raise DiagramTooLarge("open tensor too large")
        result = np.multiply.outer(result, arr)
        labels = labels + la
    return result, labels
