"""Parametric ZX-diagram simulation of Clifford+T circuits with batched scalar evaluation."""

__version__ = "0.1.0"

from .bittable import BitTable, CodecError, compile_bit_table, decompile_bit_table, deserialize, load_table, serialize
from .build import diagram_from_circuit, double_diagram
from .circuit import Circuit, CircuitError, Gate, parse_qasm
from .decompose import decompose_to_scalar, term_count_bound
from .diagram import DiagramError, EdgeType, VertexKind, ZXDiagram, dense_semantics, instantiate_diagram
from .kernel import AssignmentBatch, ParallelBackend, ReferenceBackend, evaluate_batch, get_backend, reduce_strided
from .phase import ParamPhase
from .rewrite import ParametricSymmetryError, RewriteError, clifford_simp, to_graph_like
from .ring import RingOverflowError, RingQuad
from .scalar import ScalarExpression, Subterm, SubtermKind, normalize_subterm
from .simulate import (
    MarginalSpec,
    WeakSampler,
    compile_diagram,
    marginal_doubling,
    marginal_summing,
    strong_amplitude,
    weak_sample,
)

__all__ = [
    "AssignmentBatch",
    "BitTable",
    "Circuit",
    "CircuitError",
    "CodecError",
    "DiagramError",
    "EdgeType",
    "Gate",
    "MarginalSpec",
    "ParallelBackend",
    "ParamPhase",
    "ParametricSymmetryError",
    "ReferenceBackend",
    "RewriteError",
    "RingOverflowError",
    "RingQuad",
    "ScalarExpression",
    "Subterm",
    "SubtermKind",
    "VertexKind",
    "WeakSampler",
    "ZXDiagram",
    "clifford_simp",
    "compile_bit_table",
    "compile_diagram",
    "decompile_bit_table",
    "decompose_to_scalar",
    "dense_semantics",
    "deserialize",
    "diagram_from_circuit",
    "double_diagram",
    "evaluate_batch",
    "get_backend",
    "instantiate_diagram",
    "load_table",
    "marginal_doubling",
    "marginal_summing",
    "normalize_subterm",
    "parse_qasm",
    "reduce_strided",
    "serialize",
    "strong_amplitude",
    "term_count_bound",
    "to_graph_like",
    "weak_sample",
]
