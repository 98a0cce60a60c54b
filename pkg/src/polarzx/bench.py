"""Speedup of the compile-once parametric path over per-assignment reduction."""

from __future__ import annotations

import csv
import io
import json
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .build import diagram_from_circuit
from .circuit import Circuit, layered_circuit
from .diagram import ZXDiagram, instantiate_diagram
from .kernel import Backend
from .rewrite import clifford_simp
from .simulate import MarginalSpec, compile_diagram

DEFAULT_SCHEDULE = (1, 16, 256, 4096)


def speedup(n: int, t_nonparam_per_eval: float, t_compile: float, t_eval: float) -> float:
    """``S_N``: time of ``n`` non-parametric reductions over the parametric time."""
    if n == 0:
        return 0.0
    return n * t_nonparam_per_eval / (t_compile + t_eval)


def sigmoid(n, s_inf: float, n_inflec: float):
    n = np.asarray(n, dtype=float)
    return s_inf * n / (n_inflec + n)


def fit_sigmoid(ns: Sequence[int], speedups: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares ``(S_inf, N_inflec, R^2)`` of the saturating curve."""
    x = np.asarray(ns, dtype=float)
    y = np.asarray(speedups, dtype=float)
    p0 = (max(float(y.max()), 1e-9) * 1.2, float(np.median(x)))
    with warnings.catch_warnings():
        # the covariance is unused; with two points it is undefined
        warnings.simplefilter("ignore", OptimizeWarning)
        (s_inf, n_inflec), _ = curve_fit(
            sigmoid, x, y, p0=p0, bounds=([0.0, 0.0], [np.inf, np.inf]), maxfev=20000
        )
    resid = y - sigmoid(x, s_inf, n_inflec)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float(ss_res == 0)
    return float(s_inf), float(n_inflec), r2


@dataclass
class BenchPoint:
    N: int
    t_param: float
    t_nonparam: float
    S_N: float


@dataclass
class BenchReport:
    t_compile: float
    t_eval: dict[int, float]
    t_nonparam_per_eval: float
    baseline_samples: list[float]
    points: list[BenchPoint]
    s_inf: float
    n_inflec: float
    r_squared: float
    model_s_inf: float
    model_n_inflec: float
    t_count: int
    terms: int
    params: int
    values_match: bool
    notes: dict = field(default_factory=dict)

    @property
    def monotone(self) -> bool:
        s = [p.S_N for p in sorted(self.points, key=lambda p: p.N)]
        return all(a <= b for a, b in zip(s, s[1:]))

    def speedup_at(self, n: int) -> float:
        for p in self.points:
            if p.N == n:
                return p.S_N
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "t_param", "t_nonparam", "S_N"])
        w.writerow([0, 0.0, 0.0, 0.0])
        for p in self.points:
            w.writerow([p.N, f"{p.t_param:.6g}", f"{p.t_nonparam:.6g}", f"{p.S_N:.6g}"])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = asdict(self)
        doc["t_eval"] = {str(k): v for k, v in self.t_eval.items()}
        doc["monotone"] = self.monotone
        return json.dumps(doc, indent=2)

    def write(self, prefix: str) -> tuple[str, str]:
        paths = (f"{prefix}.csv", f"{prefix}.json")
        with open(paths[0], "w") as fh:
            fh.write(self.to_csv())
        with open(paths[1], "w") as fh:
            fh.write(self.to_json())
        return paths


def benchmark_diagram(
    d: ZXDiagram,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    baseline_samples: int = 3,
    seed: int = 0,
    backend: Backend | None = None,
) -> BenchReport:
    """Time both paths on a closed parametric diagram.

    The parametric path is measured for every ``N`` in ``schedule``.  The
    non-parametric path (instantiate, then reduce and evaluate) is timed on
    ``baseline_samples`` assignments and its mean is scaled by ``N``.
    """
    schedule = sorted(set(int(n) for n in schedule))
    if not schedule or schedule[0] < 1:
        raise ValueError("the schedule needs positive evaluation counts")
    n_params = len(d.params)
    rng = np.random.Generator(np.random.Philox(seed))
    high = 1 << n_params
    words = rng.integers(0, high, size=max(schedule), dtype=np.uint64) if n_params else np.zeros(max(schedule), np.uint64)

    compiled = compile_diagram(d)

    t_eval = {}
    for n in schedule:
        start = time.perf_counter()
        values = compiled.evaluate(words[:n], backend)
        t_eval[n] = time.perf_counter() - start

    samples, baseline_values = [], []
    for w in words[: max(1, baseline_samples)]:
        assignment = {name: (int(w) >> i) & 1 for i, name in enumerate(d.params)}
        start = time.perf_counter()
        plain = compile_diagram(instantiate_diagram(d, assignment))
        (v,) = plain.evaluate([0], backend)
        samples.append(time.perf_counter() - start)
        baseline_values.append(v)
    t_np = float(np.mean(samples))
    match = all(a == b for a, b in zip(baseline_values, values))

    points = [
        BenchPoint(n, compiled.seconds + t_eval[n], n * t_np, speedup(n, t_np, compiled.seconds, t_eval[n]))
        for n in schedule
    ]
    s_inf, n_inflec, r2 = fit_sigmoid([p.N for p in points], [p.S_N for p in points])
    per_eval = t_eval[schedule[-1]] / schedule[-1]
    return BenchReport(
        t_compile=compiled.seconds,
        t_eval=t_eval,
        t_nonparam_per_eval=t_np,
        baseline_samples=samples,
        points=points,
        s_inf=s_inf,
        n_inflec=n_inflec,
        r_squared=r2,
        model_s_inf=t_np / per_eval,
        model_n_inflec=compiled.seconds / per_eval,
        t_count=post_clifford_tcount(d),
        terms=compiled.expression.m,
        params=n_params,
        values_match=match,
        notes={"baseline": "mean of sampled non-parametric reductions, scaled by N"},
    )


def summing_diagram(c: Circuit, spec: MarginalSpec | Mapping[int, int | str]) -> ZXDiagram:
    """``<a b|U|0>`` with the don't-care outputs ``b`` as parameters ``out{q}``."""
    spec = spec if isinstance(spec, MarginalSpec) else MarginalSpec(c.n_qubits, dict(spec))
    outs = [spec.fixed.get(q, f"out{q}") for q in range(c.n_qubits)]
    return diagram_from_circuit(c, [0] * c.n_qubits, outs)


def benchmark(
    c: Circuit,
    spec: MarginalSpec | Mapping[int, int | str] = {},
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    baseline_samples: int = 3,
    seed: int = 0,
    backend: Backend | None = None,
) -> BenchReport:
    return benchmark_diagram(summing_diagram(c, spec), schedule, baseline_samples, seed, backend)


def post_clifford_tcount(d: ZXDiagram) -> int:
    g = d.copy()
    clifford_simp(g)
    return g.tcount()


def find_instance(
    min_t: int = 25, max_t: int = 28, n_qubits: int = 6, layers: int = 10, seed: int = 0, attempts: int = 200
) -> tuple[Circuit, int]:
    """First layered circuit whose all-outputs-open summing diagram has a
    post-simplification T-count in ``[min_t, max_t]``."""
    for s in range(seed, seed + attempts):
        c = layered_circuit(np.random.default_rng(s), n_qubits, layers)
        t = post_clifford_tcount(summing_diagram(c, {}))
        if min_t <= t <= max_t:
            return c, t
    raise RuntimeError(f"no instance with T-count in [{min_t}, {max_t}] within {attempts} attempts")
