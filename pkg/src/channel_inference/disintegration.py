from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from channel_inference.algebra import (
    Channel,
    State,
    compose,
    distance,
    identity,
    projection,
    state_transform,
    tensor,
)
from channel_inference.constants import DEFAULT_EPS
from channel_inference.errors import DimensionError, ValidationError, ZeroMassError
from channel_inference.masks import Mask
from channel_inference.spaces import require_same

logger = logging.getLogger(__name__)


class FillPolicy(str, Enum):
    UNIFORM = "uniform"
    ERROR = "error"


@dataclass(frozen=True, eq=False)
class Disintegration:
    """A conditional channel from the input wires to the output wires, with its base marginal."""

    channel: Channel
    base: State
    fill_policy: FillPolicy
    inputs: Mask

    def reconstruct(self) -> State:
        return integrate(self.base, self.channel)


def marginal(omega: State, mask: Mask) -> State:
    mask.require_length(omega.space.wires)
    dropped = tuple(i for i, bit in enumerate(mask.bits) if not bit)
    return State(omega.space.select(mask.bits), omega.weights.sum(axis=dropped))


def reorder(omega: State, order: list[int] | tuple[int, ...]) -> State:
    return State(omega.space.permuted(order), omega.weights.transpose(order))


def inputs_first(omega: State, inputs: Mask) -> State:
    """The state with the selected wires moved to the front, both groups in original order."""
    inputs.require_length(omega.space.wires)
    return reorder(omega, inputs.indices + (~inputs).indices)


def disintegrate(omega: State, inputs: Mask, fill_policy: FillPolicy = FillPolicy.UNIFORM) -> Disintegration:
    """Conditions the wires with bit 0 on the wires with bit 1.

    channel(x)(y) = ω(x, y) / ω₁(x) where ω₁(x) > 0. Zero-mass inputs get the uniform
    row, or raise under FillPolicy.ERROR.
    """
    inputs.require_length(omega.space.wires)
    if inputs.is_empty() or inputs.is_full():
        raise ValidationError(f"Mask {inputs} must mark at least one input wire and one output wire")

    dom = omega.space.select(inputs.bits)
    cod = omega.space.select((~inputs).bits)
    joint = inputs_first(omega, inputs).weights.reshape(dom.size, cod.size)
    base = joint.sum(axis=1)

    positive = base > 0
    rows = np.empty_like(joint)
    rows[positive] = joint[positive] / base[positive, None]
    if not positive.all():
        empty = [dom.point_at(int(i)) for i in np.flatnonzero(~positive)]
        if fill_policy is FillPolicy.ERROR:
            shown = ", ".join("(" + ",".join(point) + ")" for point in empty[:5])
            raise ZeroMassError(f"Inputs with zero mass on {dom.describe()}: {shown}")
        logger.debug("uniform fill for %d zero-mass inputs on %s", len(empty), dom.describe())
        rows[~positive] = 1.0 / cod.size

    return Disintegration(
        channel=Channel(dom, cod, rows),
        base=State(dom, base),
        fill_policy=fill_policy,
        inputs=inputs,
    )


def extract(
    omega: State,
    out_mask: Mask,
    in_mask: Mask,
    fill_policy: FillPolicy = FillPolicy.UNIFORM,
) -> Channel:
    """ω[out | in]: marginalize to out ∨ in, then condition on the in wires."""
    wires = omega.space.wires
    out_mask.require_length(wires, "output mask")
    in_mask.require_length(wires, "input mask")
    if out_mask.is_empty() or in_mask.is_empty():
        raise ValidationError("Both the output mask and the input mask must select a wire")
    if out_mask.overlaps(in_mask):
        raise ValidationError(f"Output mask {out_mask} and input mask {in_mask} overlap")
    union = out_mask | in_mask
    return disintegrate(marginal(omega, union), in_mask.restrict(union), fill_policy).channel


def integrate(sigma: State, c: Channel) -> State:
    """σ ▷ c: the joint state (x, y) ↦ c(x)(y)·σ(x) on X ⊗ Y."""
    require_same(c.dom, sigma.space, "integrate")
    joint = sigma.flat[:, None] * c.matrix
    return State(c.dom.tensor(c.cod), joint)


def bayes_invert(sigma: State, c: Channel, fill_policy: FillPolicy = FillPolicy.UNIFORM) -> Channel:
    """d(y)(x) = c(x)(y)·σ(x) / c∗(σ)(y), uniform where c∗(σ)(y) = 0."""
    joint = integrate(sigma, c)
    observed = Mask((False,) * sigma.space.wires + (True,) * c.cod.wires)
    return disintegrate(joint, observed, fill_policy).channel


def invert_via_projection(omega: State, split: int = 1) -> Channel:
    """π₂ ∘ d where d inverts the first projection π₁ : X ⊗ Y → X along ω."""
    wires = omega.space.wires
    if not 0 < split < wires:
        raise DimensionError(f"Cannot split {omega.space.describe()} after {split} wires")
    first = Mask.from_indices(wires, range(split))
    d = bayes_invert(omega, projection(omega.space, first.bits))
    return compose(projection(omega.space, (~first).bits), d)


def almost_equal(c: Channel, d: Channel, sigma: State, eps: float = DEFAULT_EPS) -> bool:
    """c ≡σ d: the rows agree within eps wherever σ has mass above eps."""
    require_same(c.dom, d.dom, "almost_equal")
    require_same(c.cod, d.cod, "almost_equal")
    require_same(c.dom, sigma.space, "almost_equal")
    support = sigma.flat > eps
    return bool(np.all(np.abs(c.matrix[support] - d.matrix[support]) <= eps))


def strongly_almost_equal(c: Channel, d: Channel, omega: State, eps: float = 1e-12) -> bool:
    """(c ⊗ id)∘ω = (d ⊗ id)∘ω for a state ω on X ⊗ Z whose first marginal is the reference."""
    x_wires = c.dom.wires
    head = omega.space.select([i < x_wires for i in range(omega.space.wires)])
    require_same(c.dom, head, "strongly_almost_equal")
    rest = omega.space.select([i >= x_wires for i in range(omega.space.wires)])
    left = state_transform(tensor(c, identity(rest)), omega)
    right = state_transform(tensor(d, identity(rest)), omega)
    return distance(left, right) <= eps


def is_coupling(omega: State, sigma: State, tau: State, eps: float = DEFAULT_EPS) -> bool:
    require_same(sigma.space.tensor(tau.space), omega.space, "is_coupling")
    split = sigma.space.wires
    first = Mask.from_indices(omega.space.wires, range(split))
    return (
        distance(marginal(omega, first), sigma) <= eps
        and distance(marginal(omega, ~first), tau) <= eps
    )
