"""Stabiliser decomposition of closed diagrams into a parametric scalar expression."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .diagram import EdgeType, VertexKind, ZXDiagram
from .phase import ParamPhase
from .ring import INV_SQRT2, ONE, RingQuad, omega, sqrt2_power
from .rewrite import RewriteError, RewriteEvent, blocked_sites, clifford_simp
from .scalar import ScalarExpression

Z, X = VertexKind.Z, VertexKind.X
S, H = EdgeType.SIMPLE, EdgeType.HADAMARD


class DecompositionError(RuntimeError):
    pass


def unfuse_parametric_t(d: ZXDiagram, u: int) -> int:
    """Split a parametric T-like spider into ``(k, {})`` joined to ``(0, mask)``.

    ``u`` keeps the constant part; the id of the new parametric spider is
    returned.
    """
    if u not in d or d.is_boundary(u):
        raise RewriteError(f"vertex {u} is not a spider")
    p = d.phase(u)
    if not p.is_t_like or not p.mask:
        raise RewriteError(f"spider {u} with phase {p} is not a parametric T-like spider")
    d.set_phase(u, ParamPhase(p.k))
    w = d.add_spider(d.kind(u), ParamPhase(0, p.mask))
    d.add_edge(u, w, S)
    return w


# Six T-like spiders, each first shifted down by pi/4, are rewritten as
#     sum_j weight_j * D_j
# where D_j is a Clifford diagram.  The data below fixes the weights and the
# gadget each term attaches to the six spiders; tests check the identity
# exhaustively against the dense oracle.
_BSS_COMMON = RingQuad(-7, -5) * RingQuad(1, 0, -1, 0, 2)  # -(7 + 5 sqrt2)(1 - i)/4
_PENTAGON = ((0, 2), (0, 3), (1, 3), (1, 4), (2, 4))


def _w(a: int, b: int, sqrt2_exp: int, unit: RingQuad) -> RingQuad:
    return RingQuad(a, b) * sqrt2_power(sqrt2_exp) * unit * _BSS_COMMON


BSS_WEIGHTS: dict[str, RingQuad] = {
    "b60": _w(-16, 12, -6, ONE),
    "b66": _w(96, -68, -6, RingQuad(-1)),
    "e6": _w(10, -7, 4, omega(2)),
    "o6": _w(-14, 10, 4, omega(2)),
    "k6": _w(7, -5, 5, omega(1)),
    "phi1": _w(10, -7, 9, omega(6)),
    "phi2": _w(10, -7, 9, omega(6)),
}


def _bss_gadget(d: ZXDiagram, name: str, vs: Sequence[int]) -> None:
    if name == "b66":
        for v in vs:
            d.add_to_phase(v, ParamPhase(4))
    elif name in ("e6", "o6"):
        for v in vs:
            d.add_to_phase(v, ParamPhase(2))
        hub = d.add_spider(Z, ParamPhase(4 if name == "e6" else 0))
        for v in vs:
            d.add_edge(hub, v, H)
    elif name == "k6":
        hub = d.add_spider(Z, ParamPhase(6))
        for v in vs:
            d.add_edge(hub, v, S)
    elif name in ("phi1", "phi2"):
        if name == "phi2":
            vs = [vs[0], vs[1], vs[3], vs[4], vs[5], vs[2]]
        d.add_to_phase(vs[5], ParamPhase(4))
        ws = [d.add_spider(Z) for _ in range(5)]
        for w, v in zip(ws, vs):
            d.add_edge(w, vs[5], H)
            d.add_edge(w, v, H)
        for a, b in _PENTAGON:
            d.add_edge(ws[a], ws[b], H)


def apply_bss(d: ZXDiagram, spiders: Sequence[int]) -> list[tuple[RingQuad, ZXDiagram]]:
    """Replace six parameter-free T-like Z spiders by seven weighted Clifford diagrams."""
    spiders = list(spiders)
    if len(spiders) != 6 or len(set(spiders)) != 6:
        raise RewriteError("the six-spider decomposition needs exactly six distinct spiders")
    for v in spiders:
        if v not in d or d.kind(v) != Z:
            raise RewriteError(f"vertex {v} is not a Z spider")
        p = d.phase(v)
        if p.mask:
            raise RewriteError(f"spider {v} is parametric; unfuse it first")
        if not p.is_t_like:
            raise RewriteError(f"spider {v} with phase {p} is not T-like")
    base = d.copy()
    for v in spiders:
        base.add_to_phase(v, ParamPhase(-1))
    out = []
    for name, weight in BSS_WEIGHTS.items():
        term = base.copy()
        _bss_gadget(term, name, spiders)
        out.append((weight, term))
    return out


def apply_single_t(d: ZXDiagram, u: int) -> list[tuple[RingQuad, ZXDiagram]]:
    """Split a parameter-free T-like spider on its computational-basis value."""
    if u not in d or d.is_boundary(u):
        raise RewriteError(f"vertex {u} is not a spider")
    p = d.phase(u)
    if p.mask or not p.is_t_like:
        raise RewriteError(f"spider {u} with phase {p} is not a parameter-free T-like spider")
    out = []
    for bit, weight in ((0, ONE), (1, omega(p.k))):
        term = d.copy()
        term.set_phase(u, ParamPhase(0))
        pin = term.add_spider(X if term.kind(u) == Z else Z, ParamPhase(4 * bit))
        term.add_edge(u, pin, S)
        term.mul_scalar(INV_SQRT2)
        out.append((weight, term))
    return out


@dataclass
class DecompositionStats:
    branches: int = 0
    leaves: int = 0
    pruned: int = 0
    bss_steps: int = 0
    single_t_steps: int = 0


def decompose_to_scalar(
    d: ZXDiagram,
    trace: list[RewriteEvent] | None = None,
    stats: DecompositionStats | None = None,
    prune_zero: bool = True,
    prefer_blocked: bool = False,
) -> ScalarExpression:
    """Decompose a closed diagram into ``sum_i C_i * prod_j pair_ij``.

    Depth-first over an explicit stack: simplify, unfuse parametric T-like
    spiders, then split off the six lowest-id T-like spiders (or one, when
    fewer than six remain).  Branches whose scalar has become exactly zero
    are dropped unless ``prune_zero`` is false, in which case every branch
    is carried through to a (zero-weight) term.  ``prefer_blocked`` moves
    the spiders reported by :func:`blocked_sites` to the front of the
    selection order.
    """
    if not d.is_closed:
        raise DecompositionError("only closed diagrams (no boundary wires) can be reduced to a scalar")
    stats = stats if stats is not None else DecompositionStats()
    expr = ScalarExpression(d.params)
    stack = [d.copy()]
    while stack:
        g = stack.pop()
        stats.branches += 1
        clifford_simp(g, trace)
        if prune_zero and g.scalar.is_zero():
            stats.pruned += 1
            continue
        ts = sorted(v for v in g.spiders() if g.phase(v).is_t_like)
        if prefer_blocked and ts:
            first = set(blocked_sites(g))
            ts.sort(key=lambda v: (v not in first, v))
        if not ts:
            if g.num_spiders:
                raise DecompositionError(f"Clifford simplification left {g.num_spiders} spiders")
            stats.leaves += 1
            expr.add_term(g.scalar, g.pending, keep_zero=not prune_zero)
            continue
        for v in ts:
            if g.phase(v).mask:
                unfuse_parametric_t(g, v)
        if len(ts) >= 6:
            branches = apply_bss(g, ts[:6])
            stats.bss_steps += 1
        else:
            branches = apply_single_t(g, ts[0])
            stats.single_t_steps += 1
        for weight, h in reversed(branches):
            h.mul_scalar(weight)
            stack.append(h)
    return expr


def term_count_bound(t: int) -> int:
    """Upper bound ``7^ceil(t/6) * 2^5`` on the number of terms for T-count ``t``."""
    return 7 ** (-(-t // 6)) * 2**5
