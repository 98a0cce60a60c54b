import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarzx.phase import (
    MissingParameterError,
    ParamPhase,
    instantiate_phase,
    mask_from_indices,
    mask_indices,
    parity,
    phase_add,
)

phases = st.builds(ParamPhase, st.integers(0, 7), st.integers(0, 2**64 - 1))
words = st.integers(0, 2**64 - 1)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (ParamPhase(1), ParamPhase(1), ParamPhase(2)),
        (ParamPhase(4, 0b1), ParamPhase(4, 0b1), ParamPhase(0)),
        (ParamPhase(2, 0b01), ParamPhase(4, 0b10), ParamPhase(6, 0b11)),
    ],
)
def test_phase_add_examples(a, b, expected):
    assert phase_add(a, b) == expected == a + b


@pytest.mark.parametrize(
    "p, bits, expected",
    [
        (ParamPhase(1, 0b11), 0b11, 1),
        (ParamPhase(1, 0b11), 0b01, 5),
        (ParamPhase(6), 0b1011, 6),
    ],
)
def test_instantiate_examples(p, bits, expected):
    assert instantiate_phase(p, bits) == expected


def test_missing_parameter_raises():
    with pytest.raises(MissingParameterError):
        instantiate_phase(ParamPhase(1, 0b101), 0b001, defined=0b011)
    assert instantiate_phase(ParamPhase(1, 0b101), 0b001, defined=0b111) == 5


def test_constant_wraps_mod_8_and_mask_bounds():
    assert ParamPhase(-1).k == 7 and ParamPhase(12).k == 4
    with pytest.raises(ValueError):
        ParamPhase(0, 1 << 64)
    with pytest.raises(ValueError):
        ParamPhase(0, -1)


def test_classification():
    assert ParamPhase(4, 1).is_pauli and ParamPhase(0).is_pauli
    assert ParamPhase(6, 3).is_proper_clifford and not ParamPhase(6).is_pauli
    assert ParamPhase(3).is_t_like and ParamPhase(7, 1).is_t_like
    assert ParamPhase(2, 1).image() == {2, 6}
    assert ParamPhase(3).image() == {3}


def test_mask_helpers():
    assert mask_indices(0b10110) == [1, 2, 4]
    assert mask_from_indices([4, 1, 2]) == 0b10110
    assert parity(0b1011) == 1 and parity(0) == 0


@given(phases, phases, phases)
def test_group_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a + ParamPhase() == a
    assert a + ParamPhase(-a.k, a.mask) == ParamPhase()


@given(phases, phases, words)
def test_instantiation_is_additive(a, b, w):
    assert instantiate_phase(a + b, w) == (instantiate_phase(a, w) + instantiate_phase(b, w)) % 8


@given(phases, words)
def test_instantiation_lands_in_image(p, w):
    assert instantiate_phase(p, w) in p.image()
    assert instantiate_phase(-p, w) == (-instantiate_phase(p, w)) % 8
