"""Polarised phases: a multiple of pi/4 plus an XOR of boolean parameters."""

from __future__ import annotations

from dataclasses import dataclass

MAX_PARAMS = 64


class MissingParameterError(KeyError):
    """An assignment does not cover a parameter that is in use."""


@dataclass(frozen=True, slots=True)
class ParamPhase:
    """Phase ``k*pi/4 + pi*(XOR of the parameters in mask)``.

    ``mask`` is a bitmask over parameter indices, so the coefficient of the
    parameter part is always pi and every phase is polarised by construction.
    """

    k: int = 0
    mask: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", self.k % 8)
        if self.mask < 0 or self.mask >> MAX_PARAMS:
            raise ValueError(f"parameter mask out of range: {self.mask:#x}")

    def __add__(self, other: ParamPhase) -> ParamPhase:
        return ParamPhase(self.k + other.k, self.mask ^ other.mask)

    def __neg__(self) -> ParamPhase:
        return ParamPhase(-self.k, self.mask)

    @property
    def is_parametric(self) -> bool:
        return self.mask != 0

    @property
    def is_pauli(self) -> bool:
        """Image is contained in {0, pi}."""
        return self.k % 4 == 0

    @property
    def is_proper_clifford(self) -> bool:
        """Image is contained in {pi/2, 3pi/2}."""
        return self.k % 4 == 2

    @property
    def is_t_like(self) -> bool:
        return self.k % 2 == 1

    @property
    def is_zero(self) -> bool:
        return self.k == 0 and self.mask == 0

    def image(self) -> frozenset[int]:
        if self.mask:
            return frozenset({self.k, (self.k + 4) % 8})
        return frozenset({self.k})

    def instantiate(self, bits: int) -> int:
        return instantiate_phase(self, bits)

    def __repr__(self) -> str:
        if not self.mask:
            return f"ParamPhase({self.k})"
        return f"ParamPhase({self.k}, {sorted(mask_indices(self.mask))})"


def phase_add(a: ParamPhase, b: ParamPhase) -> ParamPhase:
    return a + b


def parity(word: int) -> int:
    return word.bit_count() & 1


def mask_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_from_indices(indices) -> int:
    mask = 0
    for i in indices:
        if not 0 <= i < MAX_PARAMS:
            raise ValueError(f"parameter index {i} outside capacity {MAX_PARAMS}")
        mask ^= 1 << i
    return mask


def instantiate_phase(p: ParamPhase, bits: int, defined: int | None = None) -> int:
    """Resolve ``p`` under the assignment word ``bits`` (bit i = value of parameter i).

    ``defined`` optionally marks which parameters the assignment actually covers;
    touching any parameter outside it raises :class:`MissingParameterError`.
    """
    if defined is not None and p.mask & ~defined:
        missing = mask_indices(p.mask & ~defined)
        raise MissingParameterError(f"assignment misses parameters {missing}")
    return (p.k + 4 * parity(p.mask & bits)) % 8
