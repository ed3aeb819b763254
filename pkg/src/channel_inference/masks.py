from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from channel_inference.errors import DimensionError, MaskParseError

MASK_PATTERN = re.compile(r"^[01](?:,[01])*$")


@dataclass(frozen=True)
class Mask:
    """One bit per wire of a product space; bit 1 selects the wire."""

    bits: tuple[bool, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(bool(bit) for bit in self.bits))

    @classmethod
    def of(cls, *bits: int | bool) -> Mask:
        return cls(tuple(bool(bit) for bit in bits))

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> Mask:
        chosen = set(indices)
        return cls(tuple(i in chosen for i in range(length)))

    @classmethod
    def full(cls, length: int) -> Mask:
        return cls((True,) * length)

    @classmethod
    def empty(cls, length: int) -> Mask:
        return cls((False,) * length)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return ",".join("1" if bit else "0" for bit in self.bits)

    def __or__(self, other: Mask) -> Mask:
        self._require_same_length(other)
        return Mask(tuple(a or b for a, b in zip(self.bits, other.bits)))

    def __and__(self, other: Mask) -> Mask:
        self._require_same_length(other)
        return Mask(tuple(a and b for a, b in zip(self.bits, other.bits)))

    def __invert__(self) -> Mask:
        return Mask(tuple(not bit for bit in self.bits))

    @property
    def count(self) -> int:
        return sum(self.bits)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, bit in enumerate(self.bits) if bit)

    def is_empty(self) -> bool:
        return not any(self.bits)

    def is_full(self) -> bool:
        return all(self.bits)

    def overlaps(self, other: Mask) -> bool:
        return not (self & other).is_empty()

    def restrict(self, within: Mask) -> Mask:
        """This mask read only at the wires `within` selects, as a mask of length within.count."""
        self._require_same_length(within)
        return Mask(tuple(a for a, keep in zip(self.bits, within.bits) if keep))

    def require_length(self, wires: int, what: str = "mask") -> None:
        if len(self.bits) != wires:
            raise DimensionError(f"{what} has {len(self.bits)} bits but the state has {wires} wires")

    def _require_same_length(self, other: Mask) -> None:
        if len(self.bits) != len(other.bits):
            raise DimensionError(f"Masks of different lengths: {self} and {other}")


def parse_mask(raw: str | Sequence[int] | Mask, wires: int | None = None) -> Mask:
    """Parses "1,0,1,0,0". An empty string is the empty selection of `wires` wires."""
    if isinstance(raw, Mask):
        mask = raw
    elif not isinstance(raw, str):
        mask = Mask.of(*raw)
    else:
        value = raw.strip().replace(" ", "")
        if not value:
            if wires is None:
                raise MaskParseError("Mask is required", position=1)
            return Mask.empty(wires)
        if not MASK_PATTERN.fullmatch(value):
            raise MaskParseError(
                "Invalid mask. Use comma-separated bits like 1,0,1", position=_first_bad_position(value)
            )
        mask = Mask(tuple(part == "1" for part in value.split(",")))
    if wires is not None:
        mask.require_length(wires)
    return mask


def _first_bad_position(value: str) -> int:
    expect_bit = True
    for i, char in enumerate(value, start=1):
        if expect_bit and char not in "01":
            return i
        if not expect_bit and char != ",":
            return i
        expect_bit = not expect_bit
    return len(value) + 1
