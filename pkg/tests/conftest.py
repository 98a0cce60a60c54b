import numpy as np
import pytest

from polarzx.diagram import EdgeType, VertexKind, ZXDiagram
from polarzx.phase import ParamPhase

_ACCEPTANCE: list[str] = []

Z, X, B = VertexKind.Z, VertexKind.X, VertexKind.BOUNDARY
S, H = EdgeType.SIMPLE, EdgeType.HADAMARD


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        print(_ACCEPTANCE[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def random_diagram(rng, n_spiders, n_params=2, p_edge=0.4, n_boundary=None, kinds=(Z, X), ks=range(8)):
    """Random diagram with parametric phases and some output wires."""
    d = ZXDiagram([f"p{i}" for i in range(n_params)])
    vs = []
    for _ in range(n_spiders):
        mask = int(rng.integers(1 << n_params)) if n_params else 0
        vs.append(d.add_spider(kinds[int(rng.integers(len(kinds)))], ParamPhase(int(rng.choice(list(ks))), mask)))
    for a in range(n_spiders):
        for b in range(a + 1, n_spiders):
            if rng.random() < p_edge:
                d.add_edge(vs[a], vs[b], S if rng.random() < 0.5 else H)
    budget = n_boundary if n_boundary is not None else int(rng.integers(0, 4))
    for v in rng.permutation(vs)[:budget]:
        b = d.add_vertex(B)
        d.add_edge(int(v), b, S if rng.random() < 0.5 else H)
        d.outputs.append(b)
    return d, vs


def all_assignments(d):
    return range(2 ** len(d.params))


def max_diff_all_assignments(d, e):
    from polarzx.diagram import dense_semantics, instantiate_diagram

    return max(
        float(np.abs(dense_semantics(instantiate_diagram(d, a)) - dense_semantics(instantiate_diagram(e, a))).max())
        for a in all_assignments(d)
    )
