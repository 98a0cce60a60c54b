"""Clifford+T circuits: data model, an OpenQASM 2.0 subset and a statevector oracle."""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

# phase gates as multiples of pi/4
PHASE_GATES = {"z": 4, "s": 2, "sdg": 6, "t": 1, "tdg": 7}
ONE_QUBIT = {"h", "x", "rz"} | set(PHASE_GATES)
TWO_QUBIT = {"cx", "cz"}
PARAM_GATES = {"param_x", "param_z"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One gate.  ``k`` is the angle of ``rz`` in units of pi/4; ``param``
    names the boolean parameter of a ``param_x`` / ``param_z`` insertion
    (X^p or Z^p)."""

    name: str
    qubits: tuple[int, ...]
    k: int = 0
    param: str | None = None

    def adjoint(self) -> Gate:
        if self.name == "rz":
            return Gate("rz", self.qubits, -self.k % 8)
        if self.name in ("s", "t"):
            return Gate(self.name + "dg", self.qubits)
        if self.name in ("sdg", "tdg"):
            return Gate(self.name[:-2], self.qubits)
        return self

    @property
    def phase_k(self) -> int | None:
        """Z-phase of a diagonal one-qubit gate, in units of pi/4."""
        if self.name == "rz":
            return self.k % 8
        return PHASE_GATES.get(self.name)


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        arity = 2 if g.name in TWO_QUBIT else 1
        if g.name not in ONE_QUBIT | TWO_QUBIT | PARAM_GATES:
            raise CircuitError(f"unsupported gate {g.name!r}")
        if len(g.qubits) != arity or len(set(g.qubits)) != arity:
            raise CircuitError(f"gate {g.name} needs {arity} distinct qubits, got {g.qubits}")
        for q in g.qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"qubit index {q} out of range for {self.n_qubits} qubits")
        if g.name in PARAM_GATES and not g.param:
            raise CircuitError("parametric insertion needs a parameter name")

    def add(self, name: str, *qubits: int, k: int = 0, param: str | None = None) -> Circuit:
        g = Gate(name, tuple(qubits), k, param)
        self._check(g)
        self.gates.append(g)
        return self

    def adjoint(self) -> Circuit:
        return Circuit(self.n_qubits, [g.adjoint() for g in reversed(self.gates)])

    def tcount(self) -> int:
        return sum(1 for g in self.gates if (g.phase_k or 0) % 2 == 1)

    @property
    def param_names(self) -> list[str]:
        names: list[str] = []
        for g in self.gates:
            if g.param and g.param not in names:
                names.append(g.param)
        return names

    def to_qasm(self) -> str:
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n_qubits}];"]
        for g in self.gates:
            if g.name in PARAM_GATES:
                lines.append(f"// param {g.param} qubit {g.qubits[0]} basis {g.name[-1]}")
            elif g.name == "rz":
                lines.append(f"rz({g.k}*pi/4) q[{g.qubits[0]}];")
            else:
                lines.append(f"{g.name} " + ",".join(f"q[{q}]" for q in g.qubits) + ";")
        return "\n".join(lines) + "\n"


# -- OpenQASM subset --------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def eval_angle(expr: str) -> float:
    """Evaluate an angle expression built from numbers, ``pi`` and + - * /."""

    def walk(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](walk(node.operand))
        raise CircuitError(f"unsupported angle expression {expr!r}")

    try:
        return walk(ast.parse(expr.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise CircuitError(f"bad angle expression {expr!r}") from exc


def angle_to_k(angle: float) -> int:
    k = round(angle / (math.pi / 4))
    if abs(angle - k * math.pi / 4) > 1e-9:
        raise CircuitError(f"angle {angle} is not a multiple of pi/4")
    return k % 8


_DIRECTIVE = re.compile(r"//\s*param\s+(\w+)\s+qubit\s+(\d+)\s+basis\s+([xz])\s*$")
_QREG = re.compile(r"qreg\s+(\w+)\s*\[\s*(\d+)\s*\]$")
_GATE = re.compile(r"(\w+)\s*(?:\((.*)\))?\s+(.+)$")
_ARG = re.compile(r"(\w+)\s*\[\s*(\d+)\s*\]$")
_IGNORED = ("OPENQASM", "include", "creg", "barrier")
_ALIASES = {"cnot": "cx", "u1": "rz", "p": "rz"}


def parse_qasm(text: str) -> Circuit:
    """Parse the supported OpenQASM 2.0 subset.

    Gates: h x z s sdg t tdg cx cz rz (rz angles must be multiples of pi/4;
    ``u1`` and ``p`` are accepted as aliases).  A comment line
    ``// param <name> qubit <i> basis <x|z>`` inserts X^p or Z^p at that point.
    """
    registers: dict[str, int] = {}
    offset = 0
    pending: list[tuple[str, tuple, int, str | None]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = _DIRECTIVE.match(line)
        if m:
            basis = "param_x" if m.group(3) == "x" else "param_z"
            pending.append((basis, (("", int(m.group(2))),), 0, m.group(1)))
            continue
        line = line.split("//", 1)[0].strip()
        for stmt in filter(None, (s.strip() for s in line.split(";"))):
            if stmt.startswith(_IGNORED):
                continue
            m = _QREG.match(stmt)
            if m:
                registers[m.group(1)] = offset
                offset += int(m.group(2))
                continue
            m = _GATE.match(stmt)
            if not m:
                raise CircuitError(f"line {lineno}: cannot parse {stmt!r}")
            name, angle, args = m.group(1).lower(), m.group(2), m.group(3)
            name = _ALIASES.get(name, name)
            if name not in ONE_QUBIT | TWO_QUBIT:
                raise CircuitError(f"line {lineno}: unsupported gate {name!r}")
            if (angle is not None) != (name == "rz"):
                raise CircuitError(f"line {lineno}: bad parameter list for {name}")
            qargs = []
            for a in args.split(","):
                am = _ARG.match(a.strip())
                if not am:
                    raise CircuitError(f"line {lineno}: bad qubit argument {a.strip()!r}")
                qargs.append((am.group(1), int(am.group(2))))
            k = angle_to_k(eval_angle(angle)) if angle is not None else 0
            pending.append((name, tuple(qargs), k, None))
    if not registers:
        raise CircuitError("no qreg declared")
    sizes = dict(registers)
    circuit = Circuit(offset)
    default = next(iter(registers))
    for name, qargs, k, param in pending:
        qubits = []
        for reg, idx in qargs:
            reg = reg or default
            if reg not in sizes:
                raise CircuitError(f"unknown register {reg!r}")
            qubits.append(sizes[reg] + idx)
        circuit.add(name, *qubits, k=k, param=param)
    return circuit


# -- statevector oracle ------------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def _one_qubit_matrix(g: Gate, params: Mapping[str, int]) -> np.ndarray:
    if g.name == "h":
        return _H
    if g.name == "x":
        return _X
    if g.name in PARAM_GATES:
        if g.param not in params:
            raise KeyError(f"missing value for parameter {g.param!r}")
        if not params[g.param]:
            return _I2
        return _X if g.name == "param_x" else np.diag([1, -1]).astype(complex)
    return np.diag([1, np.exp(1j * np.pi / 4 * g.phase_k)])


def apply_gate(state: np.ndarray, g: Gate, params: Mapping[str, int] = {}) -> np.ndarray:
    """Apply ``g`` to a state tensor of shape ``(2,) * n`` (axis i = qubit i)."""
    if g.name in TWO_QUBIT:
        c, t = g.qubits
        out = state.copy()
        sel = [slice(None)] * state.ndim
        sel[c] = 1
        sub = out[tuple(sel)]
        t_axis = t if t < c else t - 1
        if g.name == "cx":
            out[tuple(sel)] = np.flip(sub, axis=t_axis)
        else:
            idx = [slice(None)] * sub.ndim
            idx[t_axis] = 1
            sub[tuple(idx)] *= -1
            out[tuple(sel)] = sub
        return out
    (q,) = g.qubits
    m = _one_qubit_matrix(g, params)
    return np.moveaxis(np.tensordot(m, state, axes=([1], [q])), 0, q)


def statevector(c: Circuit, in_bits: Sequence[int] | None = None, params: Mapping[str, int] = {}) -> np.ndarray:
    """``U|in>`` as a flat vector; qubit 0 is the most significant bit."""
    bits = list(in_bits) if in_bits is not None else [0] * c.n_qubits
    state = np.zeros((2,) * c.n_qubits, dtype=complex)
    state[tuple(bits)] = 1.0
    for g in c.gates:
        state = apply_gate(state, g, params)
    return state.reshape(-1)


def unitary(c: Circuit, params: Mapping[str, int] = {}) -> np.ndarray:
    n = c.n_qubits
    cols = []
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        cols.append(statevector(c, bits, params))
    return np.stack(cols, axis=1)


def amplitude(c: Circuit, in_bits: Sequence[int], out_bits: Sequence[int], params: Mapping[str, int] = {}) -> complex:
    """``<out|U|in>`` by direct statevector simulation."""
    psi = statevector(c, in_bits, params)
    idx = int("".join(str(b) for b in out_bits), 2)
    return complex(psi[idx])


def marginal_probability(c: Circuit, fixed: Mapping[int, int], params: Mapping[str, int] = {}) -> float:
    """Probability that the qubits in ``fixed`` read out the given bits on ``U|0..0>``."""
    probs = np.abs(statevector(c, None, params).reshape((2,) * c.n_qubits)) ** 2
    sel = tuple(fixed.get(q, slice(None)) for q in range(c.n_qubits))
    return float(np.sum(probs[sel]))


# -- random instances --------------------------------------------------------


def random_circuit(
    rng: np.random.Generator,
    n_qubits: int,
    n_gates: int,
    max_t: int | None = None,
    n_params: int = 0,
    t_prob: float = 0.25,
) -> Circuit:
    """Random Clifford+T circuit; ``n_params`` parametric X/Z insertions are
    spread over the gate list (they count towards ``n_gates``)."""
    c = Circuit(n_qubits)
    slots = set(rng.choice(n_gates, size=min(n_params, n_gates), replace=False).tolist()) if n_params else set()
    param_id = 0
    t_left = n_gates if max_t is None else max_t
    cliffords = ["h", "s", "sdg", "z", "x", "cx", "cz"] if n_qubits > 1 else ["h", "s", "sdg", "z", "x"]
    for i in range(n_gates):
        if i in slots:
            c.add(str(rng.choice(["param_x", "param_z"])), int(rng.integers(n_qubits)), param=f"p{param_id}")
            param_id += 1
            continue
        if t_left > 0 and rng.random() < t_prob:
            c.add(str(rng.choice(["t", "tdg"])), int(rng.integers(n_qubits)))
            t_left -= 1
            continue
        name = str(rng.choice(cliffords))
        if name in TWO_QUBIT:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            c.add(name, int(a), int(b))
        else:
            c.add(name, int(rng.integers(n_qubits)))
    return c


def layered_circuit(rng: np.random.Generator, n_qubits: int, layers: int, t_prob: float = 0.6) -> Circuit:
    """Hadamard layer followed by rounds of T/T-dagger, a CNOT matching and random H.

    Unlike :func:`random_circuit` most T gates here survive Clifford
    simplification, which makes these circuits useful as benchmark loads.
    """
    c = Circuit(n_qubits)
    for q in range(n_qubits):
        c.add("h", q)
    for _ in range(layers):
        for q in range(n_qubits):
            if rng.random() < t_prob:
                c.add(str(rng.choice(["t", "tdg"])), q)
        perm = rng.permutation(n_qubits)
        for i in range(0, n_qubits - 1, 2):
            c.add("cx", int(perm[i]), int(perm[i + 1]))
        for q in range(n_qubits):
            if rng.random() < 0.5:
                c.add("h", q)
    return c
