import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import B, H, S, X, Z
from polarzx.build import diagram_from_circuit
from polarzx.circuit import amplitude, random_circuit
from polarzx.decompose import (
    BSS_WEIGHTS,
    DecompositionError,
    DecompositionStats,
    apply_bss,
    apply_single_t,
    decompose_to_scalar,
    term_count_bound,
    unfuse_parametric_t,
)
from polarzx.diagram import ZXDiagram, dense_semantics, instantiate_diagram
from polarzx.phase import ParamPhase
from polarzx.rewrite import RewriteError
from polarzx.ring import HALF, ONE, RingQuad, omega


def open_t_spiders(ks, params=()):
    d = ZXDiagram(list(params))
    vs = []
    for k in ks:
        v = d.add_spider(Z, k if isinstance(k, ParamPhase) else ParamPhase(k))
        b = d.add_vertex(B)
        d.add_edge(v, b, S)
        d.outputs.append(b)
        vs.append(v)
    return d, vs


def weighted_dense(branches):
    return sum(w.to_complex() * dense_semantics(t) for w, t in branches)


def test_unfuse_splits_constant_and_parameter():
    d, (v,) = open_t_spiders([ParamPhase(3, 0b10)], params=("p1", "p2"))
    w = unfuse_parametric_t(d, v)
    assert d.phase(v) == ParamPhase(3) and d.phase(w) == ParamPhase(0, 0b10)
    assert d.edge_counts(v, w) == (1, 0)
    d0, _ = open_t_spiders([ParamPhase(3, 0b10)], params=("p1", "p2"))
    for a in range(4):
        assert np.allclose(dense_semantics(instantiate_diagram(d, a)), dense_semantics(instantiate_diagram(d0, a)))


@pytest.mark.parametrize("phase", [ParamPhase(3), ParamPhase(2, 1), ParamPhase(0, 1)])
def test_unfuse_rejects(phase):
    d, (v,) = open_t_spiders([phase], params=("p1",))
    with pytest.raises(RewriteError):
        unfuse_parametric_t(d, v)


def test_bss_identity_against_dense():
    for ks in [(1,) * 6, (1, 3, 5, 7, 1, 3), (7, 7, 5, 5, 3, 1)]:
        d, vs = open_t_spiders(ks)
        branches = apply_bss(d, vs)
        assert len(branches) == 7
        assert np.allclose(weighted_dense(branches), dense_semantics(d), atol=1e-12)


S2 = np.sqrt(2)
HAD = np.array([[1, 1], [1, -1]]) / S2
BASIS6 = list(itertools.product((0, 1), repeat=6))


def _ph(k):
    return np.exp(1j * np.pi * k)


def _hand_gadget(name, x):
    """Contraction of each gadget against the basis vector ``x`` of the six wires."""
    w = sum(x)
    if name == "b60":
        return 1
    if name == "b66":
        return (-1) ** w
    if name in ("e6", "o6"):
        c = 1 if name == "e6" else 0
        return 1j**w * sum(_ph(c * j) * np.prod([HAD[xi, j] for xi in x]) for j in (0, 1))
    if name == "k6":
        return _ph(1.5 * x[0]) if len(set(x)) == 1 else 0
    v = list(x)
    if name == "phi2":
        v = [v[0], v[1], v[3], v[4], v[5], v[2]]
    tot = 0
    for ws in itertools.product((0, 1), repeat=5):
        a = _ph(v[5])
        for i in range(5):
            a *= HAD[ws[i], v[5]] * HAD[ws[i], v[i]]
        for i, j in ((0, 2), (0, 3), (1, 3), (1, 4), (2, 4)):
            a *= HAD[ws[i], ws[j]]
        tot += a
    return tot


# float weights written out independently of the exact ring constants
_COMMON = -(7 + 5 * S2) / (2 + 2j)
_FLOAT_WEIGHTS = {
    "b60": (-16 + 12 * S2) * S2**-6,
    "b66": (96 - 68 * S2) * S2**-6 * -1,
    "e6": (10 - 7 * S2) * S2**4 * 1j,
    "o6": (-14 + 10 * S2) * S2**4 * 1j,
    "k6": (7 - 5 * S2) * S2**5 * _ph(0.25),
    "phi1": (10 - 7 * S2) * S2**9 * -1j,
    "phi2": (10 - 7 * S2) * S2**9 * -1j,
}


def test_bss_hand_oracle_sums_to_t_state():
    for x in BASIS6:
        val = _COMMON * sum(_FLOAT_WEIGHTS[n] * _hand_gadget(n, x) for n in _FLOAT_WEIGHTS)
        assert abs(val - np.exp(1j * np.pi / 4 * sum(x))) < 1e-12


def test_bss_weights_match_hand_values():
    for name, w in BSS_WEIGHTS.items():
        assert abs(w.to_complex() - _COMMON * _FLOAT_WEIGHTS[name]) < 1e-12, name


def test_bss_terms_match_hand_gadgets():
    d, vs = open_t_spiders([1] * 6)
    for name, (_, term) in zip(BSS_WEIGHTS, apply_bss(d, vs)):
        got = dense_semantics(term)[:, 0]
        want = np.array([_hand_gadget(name, x) for x in BASIS6])
        i = int(np.argmax(abs(want)))
        assert np.allclose(got, want * (got[i] / want[i]), atol=1e-12), name


def test_bss_rejects():
    d, vs = open_t_spiders([1] * 5 + [2])
    with pytest.raises(RewriteError):
        apply_bss(d, vs)
    d, vs = open_t_spiders([1] * 6)
    with pytest.raises(RewriteError):
        apply_bss(d, vs[:5])
    d, vs = open_t_spiders([1] * 5 + [ParamPhase(1, 1)], params=("p1",))
    with pytest.raises(RewriteError):
        apply_bss(d, vs)


def test_single_t_weights():
    d, (v,) = open_t_spiders([7])
    branches = apply_single_t(d, v)
    assert [w for w, _ in branches] == [ONE, omega(7)]
    assert np.allclose(weighted_dense(branches), dense_semantics(d))
    with pytest.raises(RewriteError):
        apply_single_t(d, d.outputs[0])


def six_t_closed():
    d = ZXDiagram()
    for _ in range(6):
        d.add_spider(Z, ParamPhase(1))
    d.scalar = HALF**6
    return d


def test_six_t_without_pruning():
    stats = DecompositionStats()
    e = decompose_to_scalar(six_t_closed(), stats=stats, prune_zero=False)
    assert e.m == 7 and stats.bss_steps == 1
    assert e.evaluate(0) == ((ONE + omega(1)) * HALF) ** 6


def test_six_t_with_pruning():
    stats = DecompositionStats()
    e = decompose_to_scalar(six_t_closed(), stats=stats)
    assert e.evaluate(0) == ((ONE + omega(1)) * HALF) ** 6
    assert stats.leaves + stats.pruned == 7
    assert e.m == stats.leaves <= 7


def test_open_diagram_rejected():
    d, _ = open_t_spiders([1])
    with pytest.raises(DecompositionError):
        decompose_to_scalar(d)


def test_term_count_bound():
    assert term_count_bound(0) == 32
    assert term_count_bound(6) == 7 * 32
    assert term_count_bound(7) == 49 * 32


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_closed_parametric_diagrams(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, int(rng.integers(5, 30)), max_t=10, n_params=int(rng.integers(0, 3)), t_prob=0.4)
    ins = [int(b) for b in rng.integers(0, 2, n)]
    outs = [f"o{q}" if q < 2 and rng.random() < 0.5 else int(rng.integers(2)) for q in range(n)]
    d = diagram_from_circuit(c, ins, outs)
    e = decompose_to_scalar(d)
    assert e.m <= term_count_bound(c.tcount())
    for a in range(2 ** len(d.params)):
        bits = {p: (a >> i) & 1 for i, p in enumerate(d.params)}
        ob = [bits[x] if isinstance(x, str) else x for x in outs]
        assert abs(e.evaluate(a).to_complex() - amplitude(c, ins, ob, bits)) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_blocked_first_order_is_also_exact(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    c = random_circuit(rng, n, 30, max_t=10, n_params=2, t_prob=0.4)
    outs = [f"o{q}" if q == 0 else int(rng.integers(2)) for q in range(n)]
    d = diagram_from_circuit(c, [0] * n, outs)
    a, b = decompose_to_scalar(d), decompose_to_scalar(d, prefer_blocked=True)
    for w in range(2 ** len(d.params)):
        assert abs(a.evaluate(w).to_complex() - b.evaluate(w).to_complex()) < 1e-9
