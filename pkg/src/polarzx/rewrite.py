"""Parameter-agnostic Clifford rewriting of polarised ZX-diagrams.

Every rule mutates the diagram in place, multiplies its scalar by the exact
ring factor the rule introduces and hands emitted subterms to
:meth:`ZXDiagram.emit`.  When a ``trace`` list is supplied each rule appends
a :class:`RewriteEvent` describing what it did.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .diagram import EdgeType, VertexKind, ZXDiagram
from .phase import ParamPhase
from .ring import HALF, INV_SQRT2, ONE, RingQuad, sqrt2_power
from .scalar import Subterm, half_pi, node, phase_pair, pi_pair

_PI = ParamPhase(4)
_ZERO = ParamPhase(0)
Z, X, B = VertexKind.Z, VertexKind.X, VertexKind.BOUNDARY
S, H = EdgeType.SIMPLE, EdgeType.HADAMARD


class RewriteError(ValueError):
    """A rule was applied outside its precondition."""


class ParametricSymmetryError(RewriteError):
    """Commuting a parametric pi past a T-like spider.

    The result would need the phase ``a - 2*a*x`` whose image
    ``{a, -a}`` is not of the form ``{b, b + pi}`` when ``a`` is an odd
    multiple of pi/4, so it has no polarised representation.
    """


@dataclass(frozen=True)
class RewriteEvent:
    rule: str
    vertices: tuple[int, ...]
    subterms: tuple[Subterm, ...] = ()
    factor: RingQuad = ONE

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "vertices": list(self.vertices),
            "factor": self.factor.to_dict(),
            "subterms": [s.to_list() for s in self.subterms],
        }


def _apply(d: ZXDiagram, trace, rule: str, verts: Iterable[int], factor: RingQuad = ONE, subterms=()) -> None:
    if factor != ONE:
        d.mul_scalar(factor)
    for s in subterms:
        d.emit(s)
    if trace is not None:
        trace.append(RewriteEvent(rule, tuple(verts), tuple(subterms), factor))


def _opposite(kind: VertexKind) -> VertexKind:
    return X if kind == Z else Z


def _toggle(et: EdgeType) -> EdgeType:
    return H if et == S else S


def _single_edge(d: ZXDiagram, u: int, v: int) -> EdgeType:
    s, h = d.edge_counts(u, v)
    if s + h != 1:
        raise RewriteError(f"vertices {u} and {v} must share exactly one edge, found {s + h}")
    return S if s else H


def _edge_list(d: ZXDiagram, v: int, exclude: int | None = None) -> list[tuple[int, EdgeType]]:
    out = []
    for w, (s, h) in sorted(d.incident(v)):
        if w == exclude:
            continue
        out += [(w, S)] * s + [(w, H)] * h
    return out


def _require_spider(d: ZXDiagram, *vs: int) -> None:
    for v in vs:
        if v not in d or d.is_boundary(v):
            raise RewriteError(f"vertex {v} is not a spider")


def _effectively_opposite(d: ZXDiagram, u: int, v: int, et: EdgeType) -> bool:
    return (d.kind(u) != d.kind(v)) != (et == H)


# -- general rules ----------------------------------------------------------


def _merge(d: ZXDiagram, a: int, b: int) -> None:
    """Merge ``b`` into ``a`` keeping every edge; edges between them become loops."""
    s, h = d.edge_counts(a, b)
    ls_a, lh_a = d.edge_counts(a, a)
    ls_b, lh_b = d.edge_counts(b, b)
    d.set_edge_counts(a, b, 0, 0)
    for x, (xs, xh) in list(d.incident(b)):
        ys, yh = d.edge_counts(a, x)
        d.set_edge_counts(a, x, ys + xs, yh + xh)
    d.set_edge_counts(a, a, ls_a + ls_b + max(s - 1, 0), lh_a + lh_b + h)
    d.add_to_phase(a, d.phase(b))
    d.remove_vertex(b)


def fuse(d: ZXDiagram, u: int, v: int, trace=None) -> ZXDiagram:
    """Fuse spider ``v`` into ``u`` (same colour, joined by a simple edge)."""
    _require_spider(d, u, v)
    if u == v or d.kind(u) != d.kind(v) or d.edge_counts(u, v)[0] == 0:
        raise RewriteError(f"cannot fuse {u} and {v}: need distinct same-colour spiders with a simple edge")
    _merge(d, u, v)
    _apply(d, trace, "fuse", (u, v))
    return d


def remove_identity(d: ZXDiagram, u: int, trace=None) -> ZXDiagram:
    """Drop a phase-free arity-2 spider, composing the two edge types."""
    _require_spider(d, u)
    if d.phase(u) != _ZERO:
        raise RewriteError(f"spider {u} has phase {d.phase(u)}; only a constant zero phase is an identity")
    if d.has_loops(u) or d.degree(u) != 2:
        raise RewriteError(f"spider {u} must have arity 2 without self-loops")
    (w1, e1), (w2, e2) = _edge_list(d, u)
    d.remove_vertex(u)
    d.add_edge(w1, w2, S if e1 == e2 else H)
    _apply(d, trace, "remove_identity", (u, w1, w2))
    return d


def pi_commute(d: ZXDiagram, p: int, t: int, trace=None) -> ZXDiagram:
    """Push the Pauli spider ``p`` (arity <= 2) through its neighbour ``t``.

    ``p`` must be effectively of the opposite colour to ``t`` (kinds differ
    exactly when the joining edge is simple).  The target's phase is
    negated, which for a parametric pi can only be written as a polarised
    phase when the target is Pauli or proper Clifford.
    """
    _require_spider(d, p, t)
    phi, psi = d.phase(p), d.phase(t)
    if not phi.is_pauli:
        raise RewriteError(f"spider {p} with phase {phi} is not a Pauli spider")
    if d.has_loops(p) or d.has_loops(t) or d.degree(p) > 2:
        raise RewriteError("pi commutation needs a loop-free pi spider of arity at most 2 and a loop-free target")
    et_pt = _single_edge(d, p, t)
    if not _effectively_opposite(d, p, t, et_pt):
        raise RewriteError(f"spiders {p} and {t} are effectively the same colour")
    if phi.mask and psi.is_t_like:
        raise ParametricSymmetryError(
            f"parametric pi {phi} cannot commute through T-like phase {psi}: the image is not polarised"
        )
    others = _edge_list(d, p, exclude=t)
    if not phi.mask:
        new_psi = -psi if phi.k == 4 else psi
    elif psi.is_pauli:
        new_psi = psi
    else:
        new_psi = psi + phi

    legs = _edge_list(d, t, exclude=p)
    for x, et in legs:
        d.remove_edge(t, x, et)
    p_kind = d.kind(p)
    if others:
        (w, et_pw), = others
        d.remove_vertex(p)
        d.add_edge(w, t, et_pw if et_pt == S else _toggle(et_pw))
    else:
        d.set_phase(p, _ZERO)
    d.set_phase(t, new_psi)
    created = []
    for x, et in legs:
        q = d.add_spider(p_kind, phi)
        created.append(q)
        d.add_edge(t, q, et_pt)
        d.add_edge(q, x, et if et_pt == S else _toggle(et))
    _apply(d, trace, "pi_commute", (p, t, *created), subterms=(pi_pair(psi, phi),))
    return d


def copy_state(d: ZXDiagram, state: int, v: int, trace=None) -> ZXDiagram:
    """Copy the Pauli arity-1 ``state`` through spider ``v`` onto v's other legs."""
    _require_spider(d, state, v)
    phi, psi = d.phase(state), d.phase(v)
    if d.degree(state) != 1 or d.has_loops(state):
        raise RewriteError(f"spider {state} is not an arity-1 state")
    if not phi.is_pauli:
        raise RewriteError(f"state {state} has non-Pauli phase {phi}")
    if d.has_loops(v):
        raise RewriteError(f"spider {v} has self-loops")
    et = _single_edge(d, state, v)
    if not _effectively_opposite(d, state, v, et):
        raise RewriteError(f"state {state} and spider {v} are effectively the same colour")
    copy_kind = _opposite(d.kind(v))
    legs = _edge_list(d, v, exclude=state)
    d.remove_vertex(state)
    d.remove_vertex(v)
    created = []
    for x, et_x in legs:
        q = d.add_spider(copy_kind, phi)
        d.add_edge(q, x, et_x)
        created.append(q)
    factor = sqrt2_power(1 - len(legs))
    _apply(d, trace, "copy_state", (state, v, *created), factor, (pi_pair(psi, phi),))
    return d


# -- graph-like normal form ---------------------------------------------------


def to_graph_like(d: ZXDiagram, trace=None) -> ZXDiagram:
    """All spiders Z, spider-spider edges single Hadamard edges, no self-loops."""
    for v in sorted(d.spiders()):
        if d.kind(v) == X:
            d.set_kind(v, Z)
            for w, (s, h) in list(d.incident(v)):
                d.set_edge_counts(v, w, h, s)
            _apply(d, trace, "colour_change", (v,))

    for v in sorted(d.spiders()):
        if v not in d:
            continue
        while True:
            w = next((w for w, (s, _) in d.incident(v) if s and not d.is_boundary(w)), None)
            if w is None:
                break
            _merge(d, v, w)
            _apply(d, trace, "fuse", (v, w))

    for v, (s, h) in sorted(d.loops().items()):
        d.set_edge_counts(v, v, 0, 0)
        if h:
            d.add_to_phase(v, ParamPhase(4 * h))
        _apply(d, trace, "remove_self_loops", (v,), sqrt2_power(-h))

    for u, v, s, h in list(d.edges()):
        if h > 1 and not d.is_boundary(u) and not d.is_boundary(v):
            d.set_edge_counts(u, v, s, h % 2)
            _apply(d, trace, "hopf", (u, v), HALF ** (h // 2))
    return d


def is_graph_like(d: ZXDiagram) -> bool:
    if d.has_loops():
        return False
    for v in d.spiders():
        if d.kind(v) != Z:
            return False
    for u, v, s, h in d.edges():
        if d.is_boundary(u) or d.is_boundary(v):
            if s + h != 1:
                return False
        elif s or h != 1:
            return False
    return all(d.degree(b) == 1 for b in d.inputs + d.outputs)


def _is_interior(d: ZXDiagram, v: int) -> bool:
    return not any(d.is_boundary(w) for w in d.neighbors(v))


def _require_graph_like_spider(d: ZXDiagram, u: int) -> None:
    _require_spider(d, u)
    if d.kind(u) != Z or d.has_loops(u):
        raise RewriteError(f"spider {u} is not in graph-like form")
    for w, (s, h) in d.incident(u):
        if d.is_boundary(w):
            raise RewriteError(f"spider {u} is adjacent to boundary {w}")
        if s or h != 1 or d.kind(w) != Z:
            raise RewriteError(f"edge {u}-{w} is not a single Hadamard edge between Z spiders")


def _hopf_add(d: ZXDiagram, a: int, x: int) -> RingQuad:
    """Add a Hadamard edge between Z spiders, cancelling an existing one."""
    s, h = d.edge_counts(a, x)
    if h:
        d.set_edge_counts(a, x, s, 0)
        return HALF
    d.set_edge_counts(a, x, s, 1)
    return ONE


def local_complement(d: ZXDiagram, u: int, trace=None) -> ZXDiagram:
    """Remove an interior spider with phase +-pi/2 (+ parameters)."""
    _require_graph_like_spider(d, u)
    pu = d.phase(u)
    if not pu.is_proper_clifford:
        raise RewriteError(f"spider {u} has phase {pu}, need image in {{pi/2, 3pi/2}}")
    nbrs = sorted(d.neighbors(u))
    n = len(nbrs)
    d.remove_vertex(u)
    shift = -pu
    for v in nbrs:
        d.add_to_phase(v, shift)
    factor = sqrt2_power((n - 1) * (n - 2) // 2)
    for a, b in combinations(nbrs, 2):
        factor = factor * _hopf_add(d, a, b)
    _apply(d, trace, "local_complement", (u, *nbrs), factor, (half_pi(pu),))
    return d


def pivot(d: ZXDiagram, u: int, v: int, trace=None) -> ZXDiagram:
    """Remove two adjacent interior Pauli spiders."""
    _require_graph_like_spider(d, u)
    _require_graph_like_spider(d, v)
    if d.edge_counts(u, v) != (0, 1):
        raise RewriteError(f"spiders {u} and {v} are not joined by a Hadamard edge")
    pu, pv = d.phase(u), d.phase(v)
    if not (pu.is_pauli and pv.is_pauli):
        raise RewriteError(f"pivot needs Pauli phases, got {pu} and {pv}")
    nu = set(d.neighbors(u)) - {v}
    nv = set(d.neighbors(v)) - {u}
    both = sorted(nu & nv)
    only_u = sorted(nu - nv)
    only_v = sorted(nv - nu)
    d.remove_vertex(u)
    d.remove_vertex(v)
    for x in only_u:
        d.add_to_phase(x, pv)
    for x in only_v:
        d.add_to_phase(x, pu)
    shift = pu + pv + _PI
    for x in both:
        d.add_to_phase(x, shift)
    k0, k1, k2 = len(only_u), len(only_v), len(both)
    factor = sqrt2_power(k0 * k1 + k0 * k2 + k1 * k2 - (k0 + k1 + 2 * k2 - 1))
    for group_a, group_b in ((only_u, only_v), (only_u, both), (only_v, both)):
        for a in group_a:
            for b in group_b:
                factor = factor * _hopf_add(d, a, b)
    _apply(d, trace, "pivot", (u, v, *only_u, *only_v, *both), factor, (pi_pair(pu, pv),))
    return d


def _fuse_graph_like(d: ZXDiagram, a: int, b: int, trace) -> None:
    """Fuse Z spider ``b`` into ``a`` as if joined by a simple edge."""
    factor = ONE
    s, h = d.edge_counts(a, b)
    if h:
        d.add_to_phase(a, _PI)
        factor = factor * INV_SQRT2
    d.add_to_phase(a, d.phase(b))
    for x, (xs, xh) in list(d.incident(b)):
        if x == a:
            continue
        if d.is_boundary(x):
            d.set_edge_counts(a, x, xs, xh)
        else:
            factor = factor * _hopf_add(d, a, x)
    d.remove_vertex(b)
    _apply(d, trace, "fuse", (a, b), factor)


def _remove_identity_graph_like(d: ZXDiagram, u: int, trace) -> bool:
    if d.phase(u) != _ZERO or d.degree(u) != 2:
        return False
    (w1, e1), (w2, e2) = _edge_list(d, u)
    composed = S if e1 == e2 else H
    d.remove_vertex(u)
    _apply(d, trace, "remove_identity", (u, w1, w2))
    if d.is_boundary(w1) or d.is_boundary(w2):
        d.add_edge(w1, w2, composed)
    elif composed == S:
        _fuse_graph_like(d, w1, w2, trace)
    else:
        _apply(d, trace, "hopf", (w1, w2), _hopf_add(d, w1, w2))
    return True


def _copy_graph_like(d: ZXDiagram, s: int, v: int, trace) -> None:
    """Copy through ``v`` with the copies fused straight into v's neighbours."""
    phi, psi = d.phase(s), d.phase(v)
    legs = _edge_list(d, v, exclude=s)
    d.remove_vertex(s)
    d.remove_vertex(v)
    created = []
    for x, et in legs:
        if d.is_boundary(x):
            q = d.add_spider(Z, phi)
            d.add_edge(q, x, _toggle(et))
            created.append(q)
        else:
            d.add_to_phase(x, phi)
    factor = sqrt2_power(1 - len(legs))
    _apply(d, trace, "copy_state", (s, v, *created), factor, (pi_pair(psi, phi),))


def clifford_simp(d: ZXDiagram, trace=None) -> ZXDiagram:
    """Simplify ``d`` in place to a graph-like fixpoint.

    Passes run in ascending spider-id order: identity removal, local
    complementation, pivoting, state copying and removal of isolated
    Clifford spiders and spider pairs.  T-like spiders are only ever removed
    by copying a Pauli state through them.  A closed diagram with only
    Clifford phases (parametric or not) ends with no spiders.
    """
    to_graph_like(d, trace)
    changed = True
    while changed:
        changed = False
        for u in sorted(d.spiders()):
            if u in d and _remove_identity_graph_like(d, u, trace):
                changed = True
        for u in sorted(d.spiders()):
            if u in d and d.phase(u).is_proper_clifford and _is_interior(d, u):
                local_complement(d, u, trace)
                changed = True
        for u in sorted(d.spiders()):
            if u not in d or not d.phase(u).is_pauli or not _is_interior(d, u):
                continue
            for v in sorted(d.neighbors(u)):
                if d.phase(v).is_pauli and _is_interior(d, v):
                    pivot(d, u, v, trace)
                    changed = True
                    break
        for s in sorted(d.spiders()):
            if s not in d or not d.phase(s).is_pauli or d.degree(s) != 1:
                continue
            (v,) = d.neighbors(s)
            if not d.is_boundary(v):
                _copy_graph_like(d, s, v, trace)
                changed = True
        for u in sorted(d.spiders()):
            if u not in d:
                continue
            deg = d.degree(u)
            if d.phase(u).is_t_like:
                continue
            if deg == 0:
                pu = d.phase(u)
                d.remove_vertex(u)
                _apply(d, trace, "remove_scalar_spider", (u,), subterms=(node(pu),))
                changed = True
            elif deg == 1:
                (v,) = d.neighbors(u)
                if not d.is_boundary(v) and d.degree(v) == 1 and not d.phase(v).is_t_like:
                    pu, pv = d.phase(u), d.phase(v)
                    d.remove_vertex(u)
                    d.remove_vertex(v)
                    _apply(d, trace, "remove_scalar_pair", (u, v), INV_SQRT2, (phase_pair(pu, pv),))
                    changed = True
    sites = blocked_sites(d)
    if sites and trace is not None:
        trace.append(RewriteEvent("blocked", tuple(sites)))
    return d


def blocked_sites(d: ZXDiagram) -> list[int]:
    """T-like spiders that keep an interior parametric Pauli neighbour alive.

    With a constant phase the neighbour could be pushed through; with a
    parametric one that would break the polarised form, so simplification
    stops there until the T-like spider is decomposed.
    """
    out = set()
    for u in d.spiders():
        p = d.phase(u)
        if p.is_pauli and p.mask and _is_interior(d, u):
            out.update(v for v in d.neighbors(u) if d.phase(v).is_t_like)
    return sorted(out)
