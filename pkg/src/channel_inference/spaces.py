from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from channel_inference.errors import DimensionError, UnknownLabelError, ValidationError

Point = tuple[str, ...]


@dataclass(frozen=True)
class Space:
    """A finite set of labels; the label order fixes the index order."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))
        if not self.labels:
            raise ValidationError(f"Space '{self.name}' needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"Space '{self.name}' has duplicate labels")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(
                f"Unknown label '{label}' for '{self.name}'. Expected one of: {', '.join(self.labels)}"
            ) from None


@dataclass(frozen=True)
class ProductSpace:
    """Ordered tensor product of spaces. The empty product is the unit I with one point."""

    factors: tuple[Space, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def of(cls, *spaces: Space | ProductSpace) -> ProductSpace:
        factors: list[Space] = []
        for space in spaces:
            factors.extend(as_product(space).factors)
        return cls(tuple(factors))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(factor) for factor in self.factors)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def wires(self) -> int:
        return len(self.factors)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(factor.name for factor in self.factors)

    def describe(self) -> str:
        if not self.factors:
            return "I"
        return " ⊗ ".join(self.names)

    def tensor(self, other: Space | ProductSpace) -> ProductSpace:
        return ProductSpace(self.factors + as_product(other).factors)

    def select(self, keep: Sequence[bool]) -> ProductSpace:
        if len(keep) != self.wires:
            raise DimensionError(f"Selection of {len(keep)} wires does not fit {self.describe()}")
        return ProductSpace(tuple(f for f, bit in zip(self.factors, keep) if bit))

    def permuted(self, order: Sequence[int]) -> ProductSpace:
        return ProductSpace(tuple(self.factors[i] for i in order))

    def points(self) -> Iterator[Point]:
        # itertools.product varies the rightmost wire fastest, matching C order.
        return itertools.product(*(factor.labels for factor in self.factors))

    def coords(self, point: Sequence[str]) -> tuple[int, ...]:
        if len(point) != self.wires:
            raise DimensionError(
                f"Tuple of length {len(point)} does not fit {self.describe()} ({self.wires} wires)"
            )
        return tuple(factor.index(str(label)) for factor, label in zip(self.factors, point))

    def index_of(self, point: Sequence[str]) -> int:
        if not self.factors:
            return 0
        return int(np.ravel_multi_index(self.coords(point), self.shape))

    def point_at(self, index: int) -> Point:
        if not self.factors:
            return ()
        coords = np.unravel_index(index, self.shape)
        return tuple(factor.labels[int(i)] for factor, i in zip(self.factors, coords))


UNIT = ProductSpace(())


def as_product(space: Space | ProductSpace) -> ProductSpace:
    if isinstance(space, ProductSpace):
        return space
    return ProductSpace((space,))


def require_same(expected: ProductSpace, actual: ProductSpace, what: str) -> None:
    if expected != actual:
        raise DimensionError(f"{what}: expected {expected.describe()}, got {actual.describe()}")
