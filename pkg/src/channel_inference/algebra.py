"""Dense states and channels over finite product spaces.

Tables are numpy arrays whose axes are the wires of the spaces involved, so the
flat (C-order) index of a tuple is its mixed-radix index with the left wire most
significant. A channel X → Y stores one axis per wire of X followed by one axis per
wire of Y; a state on X is stored with the axes of X only.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from channel_inference.constants import DEFAULT_EPS
from channel_inference.errors import DimensionError, ValidationError
from channel_inference.spaces import UNIT, Point, ProductSpace, Space, as_product, require_same


def frozen_table(values: object, shape: tuple[int, ...], what: str) -> np.ndarray:
    table = np.array(values, dtype=float)
    if table.size != math.prod(shape):
        raise DimensionError(f"{what}: {table.size} entries do not fit shape {shape}")
    table = table.reshape(shape)
    if not np.all(np.isfinite(table)):
        raise ValidationError(f"{what}: entries must be finite")
    if np.any(table < 0):
        raise ValidationError(f"{what}: entries must be nonnegative")
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class Scalar:
    value: float

    def __post_init__(self) -> None:
        value = float(self.value)
        if not math.isfinite(value) or value < 0:
            raise ValidationError(f"Scalar must be finite and nonnegative, got {self.value}")
        object.__setattr__(self, "value", value)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True, eq=False)
class State:
    space: ProductSpace
    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "space", as_product(self.space))
        object.__setattr__(self, "weights", frozen_table(self.weights, self.space.shape, "State"))

    @property
    def flat(self) -> np.ndarray:
        return self.weights.reshape(-1)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def __getitem__(self, point: Sequence[str] | str) -> float:
        if isinstance(point, str):
            point = (point,)
        return float(self.weights[self.space.coords(point)])

    def items(self) -> list[tuple[Point, float]]:
        return list(zip(self.space.points(), self.flat.tolist()))


@dataclass(frozen=True, eq=False)
class Channel:
    dom: ProductSpace
    cod: ProductSpace
    table: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "dom", as_product(self.dom))
        object.__setattr__(self, "cod", as_product(self.cod))
        shape = self.dom.shape + self.cod.shape
        object.__setattr__(self, "table", frozen_table(self.table, shape, "Channel"))

    @classmethod
    def from_rows(
        cls,
        dom: Space | ProductSpace,
        cod: Space | ProductSpace,
        rows: dict[str | Point, Sequence[float]],
    ) -> Channel:
        dom_p, cod_p = as_product(dom), as_product(cod)
        matrix = np.zeros((dom_p.size, cod_p.size))
        for key, row in rows.items():
            point = (key,) if isinstance(key, str) else tuple(key)
            matrix[dom_p.index_of(point)] = row
        return cls(dom_p, cod_p, matrix)

    @property
    def matrix(self) -> np.ndarray:
        return self.table.reshape(self.dom.size, self.cod.size)

    def row(self, point: Sequence[str] | str) -> State:
        if isinstance(point, str):
            point = (point,)
        return State(self.cod, self.matrix[self.dom.index_of(point)])


def identity(space: Space | ProductSpace) -> Channel:
    space = as_product(space)
    return Channel(space, space, np.eye(space.size))


def copier(space: Space | ProductSpace, copies: int = 2) -> Channel:
    space = as_product(space)
    n = space.size
    matrix = np.zeros((n, n**copies))
    stride = sum(n**k for k in range(copies))
    matrix[np.arange(n), np.arange(n) * stride] = 1.0
    cod = ProductSpace.of(*([space] * copies)) if copies else UNIT
    return Channel(space, cod, matrix)


def discarder(space: Space | ProductSpace) -> Channel:
    space = as_product(space)
    return Channel(space, UNIT, np.ones(space.size))


def permute_wires(space: Space | ProductSpace, order: Sequence[int]) -> Channel:
    """Deterministic channel sending (x_0, ..., x_n) to (x_order[0], ..., x_order[n])."""
    space = as_product(space)
    k = space.wires
    if sorted(order) != list(range(k)):
        raise DimensionError(f"{list(order)} is not a permutation of the {k} wires of {space.describe()}")
    table = np.eye(space.size).reshape(space.shape + space.shape)
    table = table.transpose(list(range(k)) + [k + i for i in order])
    return Channel(space, space.permuted(order), table)


def swap(first: Space | ProductSpace, second: Space | ProductSpace) -> Channel:
    a, b = as_product(first), as_product(second)
    order = list(range(a.wires, a.wires + b.wires)) + list(range(a.wires))
    return permute_wires(a.tensor(b), order)


def projection(space: Space | ProductSpace, keep: Sequence[bool]) -> Channel:
    """Keeps the selected wires and discards the rest."""
    space = as_product(space)
    cod = space.select(keep)
    k = space.wires
    table = np.eye(space.size).reshape(space.shape + space.shape)
    dropped = tuple(k + i for i, bit in enumerate(keep) if not bit)
    return Channel(space, cod, table.sum(axis=dropped))


def compose(g: Channel, f: Channel) -> Channel:
    """g ∘ f: first f, then g."""
    require_same(f.cod, g.dom, "compose")
    return Channel(f.dom, g.cod, f.matrix @ g.matrix)


def tensor(f: Channel, g: Channel) -> Channel:
    a, b = f.dom.wires, f.cod.wires
    c, d = g.dom.wires, g.cod.wires
    outer = np.multiply.outer(f.table, g.table)
    order = (
        list(range(a))
        + list(range(a + b, a + b + c))
        + list(range(a, a + b))
        + list(range(a + b + c, a + b + c + d))
    )
    return Channel(f.dom.tensor(g.dom), f.cod.tensor(g.cod), outer.transpose(order))


def tensor_states(*states: State) -> State:
    weights = np.ones(())
    space = UNIT
    for state in states:
        weights = np.multiply.outer(weights, state.weights)
        space = space.tensor(state.space)
    return State(space, weights)


def tuple_channels(*channels: Channel) -> Channel:
    """Copies the shared input once per channel and runs the channels side by side."""
    if not channels:
        raise ValidationError("tuple_channels needs at least one channel")
    dom = channels[0].dom
    for channel in channels[1:]:
        require_same(dom, channel.dom, "tuple_channels")
    parallel = channels[0]
    for channel in channels[1:]:
        parallel = tensor(parallel, channel)
    return compose(parallel, copier(dom, len(channels)))


def state_transform(c: Channel, sigma: State) -> State:
    require_same(c.dom, sigma.space, "state_transform")
    return State(c.cod, sigma.flat @ c.matrix)


def state_as_channel(sigma: State) -> Channel:
    return Channel(UNIT, sigma.space, sigma.weights)


def channel_as_state(c: Channel) -> State:
    require_same(UNIT, c.dom, "channel_as_state")
    return State(c.cod, c.table)


def scale(arrow: State | Channel, s: Scalar | float) -> State | Channel:
    factor = float(Scalar(float(s)))
    if isinstance(arrow, State):
        return State(arrow.space, arrow.weights * factor)
    return Channel(arrow.dom, arrow.cod, arrow.table * factor)


def point_state(space: Space | ProductSpace, point: Sequence[str] | str) -> State:
    space = as_product(space)
    if isinstance(point, str):
        point = (point,)
    weights = np.zeros(space.size)
    weights[space.index_of(point)] = 1.0
    return State(space, weights)


def uniform_state(space: Space | ProductSpace) -> State:
    space = as_product(space)
    return State(space, np.full(space.size, 1.0 / space.size))


def state_from_rows(space: Space | ProductSpace, rows: Iterable[Sequence[str]]) -> State:
    """Empirical state: each distinct row gets (its count) / N."""
    space = as_product(space)
    counts = Counter(space.index_of(tuple(row)) for row in rows)
    total = sum(counts.values())
    if total == 0:
        raise ValidationError("Cannot build a state from an empty row set")
    weights = np.zeros(space.size)
    for index, count in counts.items():
        weights[index] = count / total
    return State(space, weights)


def is_causal(arrow: State | Channel, eps: float = DEFAULT_EPS) -> bool:
    if isinstance(arrow, State):
        return abs(arrow.mass - 1.0) <= eps
    sums = arrow.matrix.sum(axis=1)
    return bool(np.all(np.abs(sums - 1.0) <= eps))


def distance(a: State | Channel, b: State | Channel) -> float:
    """L∞ distance between two arrows of the same type."""
    if isinstance(a, State) and isinstance(b, State):
        require_same(a.space, b.space, "distance")
        return float(np.max(np.abs(a.flat - b.flat)))
    if isinstance(a, Channel) and isinstance(b, Channel):
        require_same(a.dom, b.dom, "distance")
        require_same(a.cod, b.cod, "distance")
        return float(np.max(np.abs(a.matrix - b.matrix)))
    raise DimensionError("distance compares two states or two channels")
