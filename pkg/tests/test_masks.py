import pytest

from channel_inference.errors import DimensionError, MaskParseError
from channel_inference.masks import Mask, parse_mask


@pytest.mark.parametrize(
    "raw,bits",
    [
        ("1,0,1,0,0", (True, False, True, False, False)),
        ("1", (True,)),
        (" 0, 1 ", (False, True)),
    ],
)
def test_parse_mask_valid(raw: str, bits: tuple[bool, ...]) -> None:
    assert parse_mask(raw).bits == bits


@pytest.mark.parametrize(
    "raw,position",
    [
        ("1,2,0", 3),
        ("a", 1),
        ("1,,0", 3),
        ("10", 2),
        ("1,0,", 5),
    ],
)
def test_parse_mask_reports_position(raw: str, position: int) -> None:
    with pytest.raises(MaskParseError) as info:
        parse_mask(raw)
    assert info.value.position == position
    assert f"position {position}" in str(info.value)


def test_parse_mask_checks_length() -> None:
    with pytest.raises(DimensionError):
        parse_mask("1,0", wires=3)


def test_empty_text_is_the_empty_selection_when_wires_known() -> None:
    assert parse_mask("", wires=3) == Mask.empty(3)
    with pytest.raises(MaskParseError):
        parse_mask("")


def test_mask_algebra() -> None:
    a = Mask.of(1, 0, 1, 0)
    b = Mask.of(0, 0, 1, 1)
    assert str(a | b) == "1,0,1,1"
    assert str(a & b) == "0,0,1,0"
    assert str(~a) == "0,1,0,1"
    assert a.count == 2
    assert a.indices == (0, 2)
    assert a.overlaps(b)
    assert not a.overlaps(~a)
    assert Mask.from_indices(4, [0, 2]) == a


def test_restrict_reads_bits_inside_a_selection() -> None:
    inputs = Mask.of(0, 1, 0, 1)
    union = Mask.of(1, 1, 0, 1)
    assert inputs.restrict(union) == Mask.of(0, 1, 1)
