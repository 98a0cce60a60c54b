import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarzx.circuit import Circuit, CircuitError, amplitude, marginal_probability, parse_qasm, random_circuit
from polarzx.kernel import ReferenceBackend
from polarzx.simulate import (
    MAX_SUMMED_QUBITS,
    DoublingMarginal,
    MarginalSpec,
    WeakSampler,
    marginal_doubling,
    marginal_summing,
    strong_amplitude,
    weak_sample,
)

BELL = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n")


def qasm(n, body):
    return parse_qasm(f"OPENQASM 2.0;\nqreg q[{n}];\n{body}\n")


def test_strong_small():
    assert strong_amplitude(Circuit(2), [0, 1], [0, 1]) == pytest.approx(1)
    assert strong_amplitude(Circuit(2), [0, 1], [1, 1]) == pytest.approx(0)
    assert strong_amplitude(qasm(1, "h q[0];"), [0], [1]) == pytest.approx(2**-0.5)


def test_strong_random_t8():
    rng = np.random.default_rng(11)
    c = random_circuit(rng, 4, 40, max_t=8, t_prob=0.4)
    for _ in range(4):
        ins = [int(b) for b in rng.integers(0, 2, 4)]
        outs = [int(b) for b in rng.integers(0, 2, 4)]
        assert abs(strong_amplitude(c, ins, outs) - amplitude(c, ins, outs)) < 1e-9


def test_strong_parametric_circuit():
    rng = np.random.default_rng(3)
    c = random_circuit(rng, 3, 25, max_t=5, n_params=2)
    for a in range(4):
        params = {p: (a >> i) & 1 for i, p in enumerate(c.param_names)}
        got = strong_amplitude(c, [0, 0, 0], [1, 0, 1], params, ReferenceBackend())
        assert abs(got - amplitude(c, [0, 0, 0], [1, 0, 1], params)) < 1e-9


def test_strong_rejects_open_bits_and_missing_params():
    with pytest.raises(CircuitError):
        strong_amplitude(Circuit(1), [0], ["x"])
    c = random_circuit(np.random.default_rng(0), 2, 10, n_params=1)
    with pytest.raises(CircuitError):
        strong_amplitude(c, [0, 0], [0, 0])


def test_marginal_examples():
    h = qasm(1, "h q[0];")
    assert marginal_summing(h, {}) == pytest.approx(1)
    assert marginal_summing(BELL, {0: 0}) == pytest.approx(0.5)
    assert marginal_doubling(Circuit(1), {0: 0}) == pytest.approx(1)
    assert marginal_doubling(BELL, {0: 1}) == pytest.approx(0.5)
    assert marginal_doubling(BELL, {0: 1, 1: 0}) == pytest.approx(0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_marginal_methods_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, int(rng.integers(1, 25)), max_t=4, t_prob=0.4)
    qs = [q for q in range(n) if rng.random() < 0.6]
    fixed = {q: int(rng.integers(2)) for q in qs}
    ref = marginal_probability(c, fixed)
    assert abs(marginal_summing(c, fixed) - ref) < 1e-9
    assert abs(marginal_doubling(c, fixed) - ref) < 1e-9


def test_marginal_spec_validation():
    with pytest.raises(CircuitError):
        MarginalSpec(2, {2: 0})
    with pytest.raises(CircuitError):
        MarginalSpec(2, {0: 3})
    spec = MarginalSpec(3, {0: "a", 2: 1})
    assert spec.dont_care == [1]
    assert spec.resolve({"a": 0}) == {0: 0, 2: 1}
    with pytest.raises(CircuitError):
        spec.resolve()
    assert marginal_summing(BELL, MarginalSpec(2, {0: "a"}), {"a": 1}) == pytest.approx(0.5)


def test_summing_limit():
    with pytest.raises(CircuitError, match="limit"):
        marginal_summing(Circuit(MAX_SUMMED_QUBITS + 1), {})


def test_doubling_patterns_cover_distribution():
    c = random_circuit(np.random.default_rng(5), 3, 20, max_t=3)
    m = DoublingMarginal(c, [0, 1, 2])
    patterns = np.array([[(w >> j) & 1 for j in range(3)] for w in range(8)])
    probs = [p.to_complex().real for p in m.probabilities(patterns)]
    assert sum(probs) == pytest.approx(1)
    for w, p in enumerate(probs):
        assert p == pytest.approx(marginal_probability(c, {j: (w >> j) & 1 for j in range(3)}), abs=1e-9)


def test_weak_sampling_basics():
    xs = qasm(3, "x q[0];\nx q[1];\nx q[2];")
    assert set(weak_sample(xs, 20, seed=1)) == {"111"}
    a = weak_sample(BELL, 50, seed=7)
    assert a == weak_sample(BELL, 50, seed=7)
    assert set(a) <= {"00", "11"}
    sampler = WeakSampler(random_circuit(np.random.default_rng(1), 4, 20, max_t=3))
    sampler.sample(5, seed=0)
    assert sampler.compilations == 4
    with pytest.raises(ValueError):
        sampler.sample(0)


def test_weak_sampling_distribution():
    c = random_circuit(np.random.default_rng(9), 3, 20, max_t=3)
    n = 4000
    samples = weak_sample(c, n, seed=3)
    for w in range(8):
        s = "".join(str((w >> j) & 1) for j in range(3))
        p = marginal_probability(c, {j: (w >> j) & 1 for j in range(3)})
        freq = samples.count(s) / n
        assert abs(freq - p) < 5 * np.sqrt(p * (1 - p) / n) + 1e-3, s


def test_literal_mode_runs():
    samples = weak_sample(BELL, 200, seed=0, literal=True)
    assert set(samples) <= {"00", "01", "10", "11"}
