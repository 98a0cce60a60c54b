import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cases import CASES, commuting_square_error
from conftest import B, H, S, X, Z, max_diff_all_assignments
from polarzx.build import diagram_from_circuit
from polarzx.circuit import random_circuit
from polarzx.diagram import ZXDiagram, dense_semantics, instantiate_diagram
from polarzx.phase import ParamPhase
from polarzx.rewrite import (
    ParametricSymmetryError,
    RewriteError,
    blocked_sites,
    clifford_simp,
    copy_state,
    fuse,
    is_graph_like,
    local_complement,
    pi_commute,
    pivot,
    remove_identity,
    to_graph_like,
)
from polarzx.scalar import SubtermKind


def boundary(d, v, et=S):
    b = d.add_vertex(B)
    d.add_edge(v, b, et)
    d.outputs.append(b)
    return b


def pair(pu, pv, params=("p1", "p2")):
    d = ZXDiagram(list(params))
    u, v = d.add_spider(Z, pu), d.add_spider(Z, pv)
    d.add_edge(u, v, S)
    boundary(d, u)
    boundary(d, v)
    return d, u, v


@pytest.mark.parametrize(
    "pu, pv, expected",
    [
        (ParamPhase(1), ParamPhase(1), ParamPhase(2)),
        (ParamPhase(4, 1), ParamPhase(4, 1), ParamPhase(0)),
        (ParamPhase(2, 1), ParamPhase(1, 2), ParamPhase(3, 3)),
    ],
)
def test_fuse_examples(pu, pv, expected):
    d, u, v = pair(pu, pv)
    e = fuse(d.copy(), u, v)
    assert e.phase(u) == expected and v not in e
    assert max_diff_all_assignments(d, e) < 1e-12


def test_fuse_rejects_other_colours():
    d, u, v = pair(ParamPhase(1), ParamPhase(1))
    d.set_kind(v, X)
    with pytest.raises(RewriteError):
        fuse(d, u, v)


def test_remove_identity_examples():
    d = ZXDiagram(["p1"])
    i, o = d.add_vertex(B), d.add_vertex(B)
    u = d.add_spider(Z)
    d.add_edge(i, u)
    d.add_edge(u, o, H)
    d.inputs, d.outputs = [i], [o]
    e = remove_identity(d.copy(), u)
    assert e.num_spiders == 0 and e.edge_counts(i, o) == (0, 1)
    assert np.allclose(dense_semantics(d), dense_semantics(e))
    for bad in (ParamPhase(0, 1), ParamPhase(4)):
        d.set_phase(u, bad)
        with pytest.raises(RewriteError):
            remove_identity(d.copy(), u)


def pi_setup(phi, psi, params=("p1", "p2")):
    d = ZXDiagram(list(params))
    t = d.add_spider(Z, psi)
    p = d.add_spider(X, phi)
    d.add_edge(p, t)
    boundary(d, p)
    boundary(d, t)
    boundary(d, t, H)
    return d, p, t


def test_pi_commute_examples():
    d, p, t = pi_setup(ParamPhase(4), ParamPhase(1))
    e = pi_commute(d.copy(), p, t)
    assert e.phase(t) == ParamPhase(7)
    assert max_diff_all_assignments(d, e) < 1e-12

    d, p, t = pi_setup(ParamPhase(0, 0b01), ParamPhase(2, 0b10))
    e = pi_commute(d.copy(), p, t)
    assert e.phase(t) == ParamPhase(2, 0b11)
    assert max_diff_all_assignments(d, e) < 1e-12

    d, p, t = pi_setup(ParamPhase(0, 0b01), ParamPhase(4, 0b10))
    e = pi_commute(d.copy(), p, t)
    assert e.phase(t) == ParamPhase(4, 0b10)
    assert max_diff_all_assignments(d, e) < 1e-12


def test_pi_commute_through_t_like_is_refused():
    d, p, t = pi_setup(ParamPhase(0, 0b01), ParamPhase(1))
    before = d.to_dict()
    with pytest.raises(ParametricSymmetryError):
        pi_commute(d, p, t)
    assert d.to_dict() == before


def test_copy_state_subterms():
    def run(phi, psi):
        d = ZXDiagram(["p1"])
        v = d.add_spider(Z, psi)
        s = d.add_spider(X, phi)
        d.add_edge(s, v)
        boundary(d, v)
        trace = []
        e = copy_state(d.copy(), s, v, trace)
        assert max_diff_all_assignments(d, e) < 1e-12
        (st_,) = trace[-1].subterms
        assert st_.kind is SubtermKind.PI_PAIR
        return st_

    assert run(ParamPhase(0), ParamPhase(3)).evaluate(0).to_complex() == pytest.approx(1)
    assert run(ParamPhase(4), ParamPhase(1)).evaluate(0).to_complex() == pytest.approx(np.exp(1j * np.pi / 4))
    s = run(ParamPhase(0, 1), ParamPhase(2))
    assert s.evaluate(0).to_complex() == pytest.approx(1)
    assert s.evaluate(1).to_complex() == pytest.approx(1j)


def graph_like_star(pu, nbr_phases, params=("p1",)):
    d = ZXDiagram(list(params))
    u = d.add_spider(Z, pu)
    nbrs = [d.add_spider(Z, p) for p in nbr_phases]
    for v in nbrs:
        d.add_edge(u, v, H)
        boundary(d, v)
    return d, u, nbrs


def test_local_complement_examples():
    d, u, (a, b) = graph_like_star(ParamPhase(2), [ParamPhase(0), ParamPhase(3)])
    e = local_complement(d.copy(), u)
    assert u not in e and e.edge_counts(a, b) == (0, 1)
    assert max_diff_all_assignments(d, e) < 1e-12

    d, u, (a,) = graph_like_star(ParamPhase(2, 1), [ParamPhase(1)])
    e = local_complement(d.copy(), u)
    assert e.phase(a) == ParamPhase(7, 1)
    assert max_diff_all_assignments(d, e) < 1e-12

    d, u, nbrs = graph_like_star(ParamPhase(6), [ParamPhase(k) for k in (1, 2, 5)])
    assert max_diff_all_assignments(d, local_complement(d.copy(), u)) < 1e-12


def test_local_complement_rejects():
    d, u, _ = graph_like_star(ParamPhase(1), [ParamPhase(0)])
    with pytest.raises(RewriteError):
        local_complement(d, u)
    d = ZXDiagram()
    u = d.add_spider(Z, ParamPhase(2))
    boundary(d, u)
    with pytest.raises(RewriteError):
        local_complement(d, u)


@pytest.mark.parametrize(
    "pu, pv, values",
    [
        (ParamPhase(0), ParamPhase(0), {0: 1}),
        (ParamPhase(4), ParamPhase(4), {0: -1}),
        (ParamPhase(0, 1), ParamPhase(4), {0: 1, 1: -1}),
    ],
)
def test_pivot_examples(pu, pv, values):
    d = ZXDiagram(["p1"])
    u, v = d.add_spider(Z, pu), d.add_spider(Z, pv)
    d.add_edge(u, v, H)
    a, b = d.add_spider(Z, ParamPhase(1)), d.add_spider(Z, ParamPhase(2))
    d.add_edge(u, a, H)
    d.add_edge(v, b, H)
    d.add_edge(u, b, H)
    boundary(d, a)
    boundary(d, b)
    trace = []
    e = pivot(d.copy(), u, v, trace)
    assert u not in e and v not in e
    assert max_diff_all_assignments(d, e) < 1e-12
    (s,) = trace[-1].subterms
    for w, want in values.items():
        assert s.evaluate(w).to_complex() == pytest.approx(want)


def test_to_graph_like_examples():
    d = ZXDiagram()
    i, o = d.add_vertex(B), d.add_vertex(B)
    x = d.add_spider(X, ParamPhase(3))
    d.add_edge(i, x)
    d.add_edge(x, o)
    d.inputs, d.outputs = [i], [o]
    e = to_graph_like(d.copy())
    assert e.kind(x) == Z and e.edge_counts(i, x) == (0, 1) and e.edge_counts(x, o) == (0, 1)
    assert np.allclose(dense_semantics(d), dense_semantics(e))
    f = to_graph_like(e.copy())
    assert f.to_dict() == e.to_dict()

    d = ZXDiagram()
    u, v = d.add_spider(Z, ParamPhase(1)), d.add_spider(Z, ParamPhase(2))
    d.add_edge(u, v, S, count=2)
    boundary(d, u)
    e = to_graph_like(d.copy())
    assert e.num_spiders == 1 and is_graph_like(e)
    assert np.allclose(dense_semantics(d), dense_semantics(e))


@pytest.mark.parametrize("rule", sorted(CASES))
def test_commuting_square_per_rule(rule):
    rng = np.random.default_rng(sorted(CASES).index(rule))
    for _ in range(40):
        d, apply = CASES[rule](rng)
        assert commuting_square_error(d, apply) <= 1e-12


def test_trace_replays_scalar():
    rng = np.random.default_rng(2)
    c = random_circuit(rng, 3, 30, max_t=2)
    d = diagram_from_circuit(c, [0, 1, 0], [1, 0, "o"])
    trace = []
    e = clifford_simp(d.copy(), trace)
    scalar = d.scalar
    pending = list(d.pending)
    for ev in trace:
        scalar = scalar * ev.factor
        for sub in ev.subterms:
            if sub.is_constant:
                scalar = scalar * sub.evaluate(0)
            else:
                pending.append(sub)
    assert scalar == e.scalar and pending == e.pending
    assert all(s.kind in SubtermKind for ev in trace for s in ev.subterms)
    assert all(set(ev.to_dict()) == {"rule", "vertices", "factor", "subterms"} for ev in trace)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_clifford_simp_closed_clifford_circuits_vanish(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    c = random_circuit(rng, n, int(rng.integers(0, 40)), max_t=0, n_params=int(rng.integers(0, 3)))
    ins = [int(b) for b in rng.integers(0, 2, n)]
    outs = [f"o{q}" if rng.random() < 0.4 else int(rng.integers(2)) for q in range(n)]
    d = diagram_from_circuit(c, ins, outs)
    e = clifford_simp(d.copy())
    assert e.num_spiders == 0
    assert max_diff_all_assignments(d, e) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_clifford_simp_preserves_semantics_and_t_count(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, int(rng.integers(0, 30)), max_t=int(rng.integers(0, 5)), n_params=int(rng.integers(0, 3)))
    d = diagram_from_circuit(c, [None] * n, [None] * n)
    e = clifford_simp(d.copy())
    assert e.tcount() <= d.tcount()
    assert is_graph_like(e)
    assert max_diff_all_assignments(d, e) < 1e-12


def test_t_spiders_survive():
    d = ZXDiagram()
    a, b = d.add_spider(Z, ParamPhase(1)), d.add_spider(Z, ParamPhase(3))
    d.add_edge(a, b, H)
    e = clifford_simp(d.copy())
    assert e.num_spiders >= 2
    assert np.allclose(dense_semantics(d), dense_semantics(e))


def test_blocked_sites_reported():
    d = ZXDiagram(["p1"])
    u = d.add_spider(Z, ParamPhase(0, 1))
    t1, t2 = d.add_spider(Z, ParamPhase(1)), d.add_spider(Z, ParamPhase(3))
    d.add_edge(u, t1, H)
    d.add_edge(u, t2, H)
    boundary(d, t1)
    boundary(d, t2)
    trace = []
    e = clifford_simp(d.copy(), trace)
    assert blocked_sites(e) == sorted([t1, t2])
    assert trace[-1].rule == "blocked" and set(trace[-1].vertices) == {t1, t2}
    d.set_phase(u, ParamPhase(0))
    assert blocked_sites(d) == []
