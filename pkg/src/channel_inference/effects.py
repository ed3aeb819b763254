"""Effects, validity and conditioning: the non-causal fragment.

An effect is a nonnegative (not necessarily ≤ 1) function on a space. States that
are not normalized appear as SubState values, e.g. the numerator σ·p of a
conditioning before it is divided by the validity σ ⊨ p.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from channel_inference.algebra import Channel, Scalar, State, frozen_table, state_transform
from channel_inference.constants import DEFAULT_EPS
from channel_inference.disintegration import disintegrate, extract, marginal
from channel_inference.errors import ConditioningError, DimensionError, EffectParseError
from channel_inference.masks import Mask
from channel_inference.spaces import Point, ProductSpace, Space, as_product, require_same

SubState = State

LABEL_VALUE_PATTERN = re.compile(r"^(?P<label>[^:{}]+):(?P<value>[^:]+)$")


@dataclass(frozen=True, eq=False)
class Effect:
    space: ProductSpace
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "space", as_product(self.space))
        object.__setattr__(self, "values", frozen_table(self.values, self.space.shape, "Effect"))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __getitem__(self, point: Sequence[str] | str) -> float:
        if isinstance(point, str):
            point = (point,)
        return float(self.values[self.space.coords(point)])

    def __and__(self, other: Effect) -> Effect:
        """Pointwise product p & q."""
        require_same(self.space, other.space, "effect product")
        return Effect(self.space, self.values * other.values)

    def items(self) -> list[tuple[Point, float]]:
        return list(zip(self.space.points(), self.flat.tolist()))


def effect_from_mapping(space: Space | ProductSpace, values: dict[str | Point, float]) -> Effect:
    space = as_product(space)
    table = np.zeros(space.size)
    for key, value in values.items():
        point = (key,) if isinstance(key, str) else tuple(key)
        table[space.index_of(point)] = value
    return Effect(space, table)


def truth(space: Space | ProductSpace) -> Effect:
    space = as_product(space)
    return Effect(space, np.ones(space.size))


def indicator(space: Space | ProductSpace, points: Iterable[str | Point]) -> Effect:
    return effect_from_mapping(space, {point: 1.0 for point in points})


def validity(sigma: State, p: Effect) -> Scalar:
    """σ ⊨ p = Σ_x σ(x)·p(x)."""
    require_same(sigma.space, p.space, "validity")
    return Scalar(float(sigma.flat @ p.flat))


def weighted(sigma: State, p: Effect) -> SubState:
    require_same(sigma.space, p.space, "weighted")
    return State(sigma.space, sigma.weights * p.values)


def normalize(sigma: SubState, eps: float = DEFAULT_EPS) -> State:
    mass = sigma.mass
    if mass <= eps:
        raise ConditioningError(f"Cannot normalize a state of mass {mass:g}")
    return State(sigma.space, sigma.weights / mass)


def condition(sigma: State, p: Effect, eps: float = DEFAULT_EPS) -> State:
    """σ|p(x) = σ(x)·p(x) / (σ ⊨ p)."""
    v = validity(sigma, p).value
    if v <= eps:
        raise ConditioningError(f"Conditioning undefined: validity {v:g} is not above {eps:g}")
    return State(sigma.space, sigma.weights * p.values / v)


def predicate_transform(c: Channel, q: Effect) -> Effect:
    """c*(q)(x) = Σ_y c(x)(y)·q(y)."""
    require_same(c.cod, q.space, "predicate_transform")
    return Effect(c.dom, c.matrix @ q.flat)


def weaken(q: Effect, left: Space | ProductSpace) -> Effect:
    """𝟙 ⊗ q on left ⊗ q.space."""
    left = as_product(left)
    values = np.broadcast_to(q.flat[None, :], (left.size, q.space.size))
    return Effect(left.tensor(q.space), values)


def extend(q: Effect, space: Space | ProductSpace, mask: Mask) -> Effect:
    """q read off the masked wires of `space`; constant along the other wires."""
    space = as_product(space)
    mask.require_length(space.wires, "effect mask")
    require_same(space.select(mask.bits), q.space, "extend")
    shape = tuple(n if bit else 1 for n, bit in zip(space.shape, mask.bits))
    return Effect(space, np.broadcast_to(q.values.reshape(shape), space.shape))


class CrossoverPath(str, Enum):
    BACKWARD = "backward"
    JOINT_THEN_MARGINAL = "joint"
    FORWARD = "forward"


def crossover(
    omega: State,
    q: Effect,
    path: CrossoverPath,
    split: int = 1,
    eps: float = DEFAULT_EPS,
) -> State:
    """Posterior on X after observing q on Y, for ω on X ⊗ Y with X the first `split` wires.

    BACKWARD:            ω₁ | c₁*(q)        with c₁ = ω[Y | X]
    JOINT_THEN_MARGINAL: (ω | 𝟙 ⊗ q)₁
    FORWARD:             (c₂)∗(ω₂ | q)      with c₂ = ω[X | Y]
    """
    wires = omega.space.wires
    if not 0 < split < wires:
        raise DimensionError(f"Cannot split {omega.space.describe()} after {split} wires")
    first = Mask.from_indices(wires, range(split))
    x_space = omega.space.select(first.bits)
    require_same(omega.space.select((~first).bits), q.space, "crossover")

    if path is CrossoverPath.BACKWARD:
        part = disintegrate(omega, first)
        return condition(part.base, predicate_transform(part.channel, q), eps)
    if path is CrossoverPath.JOINT_THEN_MARGINAL:
        return marginal(condition(omega, weaken(q, x_space), eps), first)
    if path is CrossoverPath.FORWARD:
        c2 = extract(omega, first, ~first)
        return state_transform(c2, condition(marginal(omega, ~first), q, eps))
    raise DimensionError(f"Unknown crossover path: {path}")


def parse_effect(raw: str, space: Space | ProductSpace) -> Effect:
    """Parses "t:1,f:0" or the event syntax "{t}" / "{t,f}".

    Labels of multi-wire spaces are joined with "/", e.g. "m/d:1". Unlisted labels get 0.
    """
    space = as_product(space)
    text = raw.strip()
    if not text:
        raise EffectParseError("Effect is required")

    def point_of(label: str) -> Point:
        parts = tuple(part.strip() for part in label.split("/"))
        if len(parts) != space.wires:
            raise EffectParseError(
                f"Label '{label}' has {len(parts)} parts but {space.describe()} has {space.wires} wires"
            )
        return parts

    if text.startswith("{"):
        if not text.endswith("}"):
            raise EffectParseError("Event syntax must close with '}'")
        inner = text[1:-1].strip()
        labels = [part.strip() for part in inner.split(",")] if inner else []
        return indicator(space, [point_of(label) for label in labels])

    values: dict[str | Point, float] = {}
    for item in text.split(","):
        match = LABEL_VALUE_PATTERN.fullmatch(item.strip())
        if not match:
            raise EffectParseError(f"Invalid effect entry '{item.strip()}'. Use label:value, e.g. t:1,f:0")
        try:
            value = float(match.group("value"))
        except ValueError:
            raise EffectParseError(f"Invalid number in effect entry '{item.strip()}'") from None
        if not np.isfinite(value) or value < 0:
            raise EffectParseError(f"Effect values must be finite and nonnegative: '{item.strip()}'")
        values[point_of(match.group("label").strip())] = value
    return effect_from_mapping(space, values)
