"""Parametric scalar subterms and the sum-of-products normal form.

Every scalar emitted by a rewrite is one of four subterm kinds.  All of them
can be rewritten as a ring constant times a single *phase pair*

    pair(A, B) = 1 + e^{iA} + e^{iB} - e^{i(A+B)}

which is the only kind stored in a :class:`ScalarExpression`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .phase import MAX_PARAMS, MissingParameterError, ParamPhase, instantiate_phase
from .ring import HALF, ONE, ZERO, RingQuad, omega

PAIR_CONVENTION = "pair(A,B)=1+e^{iA}+e^{iB}-e^{i(A+B)}"


class SubtermKind(str, Enum):
    NODE = "node"
    PHASE_PAIR = "phase_pair"
    HALF_PI = "half_pi"
    PI_PAIR = "pi_pair"


class SubtermError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Subterm:
    kind: SubtermKind
    psi: ParamPhase
    phi: ParamPhase = ParamPhase()

    def __post_init__(self) -> None:
        if self.kind is SubtermKind.HALF_PI and not self.psi.is_proper_clifford:
            raise SubtermError(f"half-pi subterm needs image in {{pi/2, 3pi/2}}, got {self.psi}")
        if self.kind is SubtermKind.PI_PAIR and not (self.psi.is_pauli or self.phi.is_pauli):
            raise SubtermError(f"pi-pair subterm needs a phase with image in {{0, pi}}: {self.psi}, {self.phi}")

    @property
    def mask(self) -> int:
        if self.kind in (SubtermKind.NODE, SubtermKind.HALF_PI):
            return self.psi.mask
        return self.psi.mask | self.phi.mask

    @property
    def is_constant(self) -> bool:
        return self.mask == 0

    def evaluate(self, bits: int = 0, defined: int | None = None) -> RingQuad:
        a = instantiate_phase(self.psi, bits, defined)
        if self.kind is SubtermKind.NODE:
            return ONE + omega(a)
        if self.kind is SubtermKind.HALF_PI:
            # e^{i psi / 2} with psi taken in (-pi, pi]
            return omega(1) if a == 2 else omega(7)
        b = instantiate_phase(self.phi, bits, defined)
        if self.kind is SubtermKind.PHASE_PAIR:
            return pair_value(a, b)
        if b % 4 == 0:
            return omega(a * (b // 4))
        return omega(b * (a // 4))

    def to_list(self) -> list:
        return [self.kind.value, self.psi.k, self.psi.mask, self.phi.k, self.phi.mask]


def pair_value(a: int, b: int) -> RingQuad:
    return ONE + omega(a) + omega(b) - omega(a + b)


def node(psi: ParamPhase) -> Subterm:
    return Subterm(SubtermKind.NODE, psi)


def phase_pair(psi: ParamPhase, phi: ParamPhase) -> Subterm:
    return Subterm(SubtermKind.PHASE_PAIR, psi, phi)


def half_pi(psi: ParamPhase) -> Subterm:
    return Subterm(SubtermKind.HALF_PI, psi)


def pi_pair(psi: ParamPhase, phi: ParamPhase) -> Subterm:
    return Subterm(SubtermKind.PI_PAIR, psi, phi)


_NODE_CONST = RingQuad(1, 0, -1, 0, 1)  # (1 - i)/2
_PI_HALF = ParamPhase(2)
_MINUS_PI_HALF = ParamPhase(6)


def normalize_subterm(s: Subterm) -> tuple[RingQuad, Subterm | None]:
    """Rewrite ``s`` as ``K * pair`` (or as a bare constant when it is
    assignment independent)."""
    if s.is_constant:
        return s.evaluate(0), None
    if s.kind is SubtermKind.PHASE_PAIR:
        return ONE, s
    if s.kind is SubtermKind.NODE:
        # 1 + e^{iP} = (1 - i)/2 * pair(P + pi/2, pi/2)
        return _NODE_CONST, phase_pair(s.psi + _PI_HALF, _PI_HALF)
    if s.kind is SubtermKind.PI_PAIR:
        psi, phi = (s.psi, s.phi) if s.phi.is_pauli else (s.phi, s.psi)
        # e^{i P Q / pi} = pair(P, Q) / 2 whenever Q takes values in {0, pi}
        return HALF, phase_pair(psi, phi)
    # half-pi: P = +-pi/2 + pi*x, so e^{iP/2} = e^{+-i pi/4} e^{-+i pi x/2}
    flag = ParamPhase(0, s.psi.mask)
    if s.psi.k == 2:
        return omega(1) * HALF, phase_pair(_MINUS_PI_HALF, flag)
    return omega(7) * HALF, phase_pair(_PI_HALF, flag)


@dataclass(frozen=True)
class Term:
    constant: RingQuad
    pairs: tuple[Subterm, ...] = ()

    def __post_init__(self) -> None:
        for s in self.pairs:
            if s.kind is not SubtermKind.PHASE_PAIR:
                raise SubtermError(f"expression terms hold phase pairs only, got {s.kind.value}")


@dataclass
class ScalarExpression:
    """``sum_i C_i * prod_j pair(A_ij, B_ij)`` over named boolean parameters."""

    param_names: tuple[str, ...] = ()
    terms: list[Term] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.param_names = tuple(self.param_names)
        if len(self.param_names) > MAX_PARAMS:
            raise ValueError(f"at most {MAX_PARAMS} parameters are supported")

    @property
    def num_params(self) -> int:
        return len(self.param_names)

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def n_max(self) -> int:
        return max((len(t.pairs) for t in self.terms), default=0)

    def add_term(self, constant: RingQuad, subterms: Iterable[Subterm] = (), keep_zero: bool = False) -> None:
        """Normalise ``subterms`` to phase pairs and append the term.

        Terms with a zero constant are dropped unless ``keep_zero`` is set.
        """
        c = constant
        pairs = []
        for s in subterms:
            k, p = normalize_subterm(s)
            c = c * k
            if p is not None:
                pairs.append(p)
        if keep_zero or not c.is_zero():
            self.terms.append(Term(c, tuple(pairs)))

    def assignment_word(self, assignment: Mapping[str, int] | Sequence[int] | str | int) -> int:
        return assignment_word(self.param_names, assignment)

    def evaluate(self, assignment=0) -> RingQuad:
        return eval_expression_reference(self, assignment)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScalarExpression):
            return NotImplemented
        return self.param_names == other.param_names and self.terms == other.terms


def assignment_word(names: Sequence[str], assignment) -> int:
    """Pack an assignment into a word: bit i holds the value of ``names[i]``.

    Accepts an int word, a bitstring / bit sequence in parameter order, or a
    name -> bit mapping that must cover every parameter.
    """
    n = len(names)
    if isinstance(assignment, int):
        if assignment < 0 or assignment >> n:
            raise ValueError(f"assignment word {assignment:#x} has bits beyond {n} parameters")
        return assignment
    if isinstance(assignment, Mapping):
        missing = [p for p in names if p not in assignment]
        if missing:
            raise MissingParameterError(f"assignment misses parameters {missing}")
        bits = [assignment[p] for p in names]
    else:
        bits = [int(c) for c in assignment]
        if len(bits) != n:
            raise MissingParameterError(f"expected {n} bits, got {len(bits)}")
    word = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {b!r}")
        word |= b << i
    return word


def eval_expression_reference(e: ScalarExpression, assignment=0) -> RingQuad:
    """Plain sequential exact evaluation."""
    bits = e.assignment_word(assignment)
    total = ZERO
    for t in e.terms:
        prod = t.constant
        for s in t.pairs:
            prod = prod * s.evaluate(bits)
        total = total + prod
    return total
