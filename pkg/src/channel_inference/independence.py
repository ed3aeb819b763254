"""Conditional independence X ⟂ Y | Z of wire groups of a joint state."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from channel_inference.algebra import (
    Channel,
    State,
    compose,
    copier,
    identity,
    projection,
    state_as_channel,
    state_transform,
    tensor,
)
from channel_inference.constants import CI_EPS
from channel_inference.disintegration import almost_equal, disintegrate, integrate, marginal, reorder
from channel_inference.errors import ValidationError
from channel_inference.masks import Mask


class Formulation(str, Enum):
    COND_FACTOR = "cond-factor"
    FACTORIZE3 = "factorize3"
    DROP_Y = "drop-y"
    FACTOR_PAIR = "factor-pair"


@dataclass(frozen=True)
class WireGroups:
    x_mask: Mask
    y_mask: Mask
    z_mask: Mask

    def __post_init__(self) -> None:
        n = len(self.x_mask)
        if len(self.y_mask) != n or len(self.z_mask) != n:
            raise ValidationError("x, y and z masks must have the same length")
        if self.x_mask.is_empty() or self.y_mask.is_empty():
            raise ValidationError("x and y masks must each select at least one wire")
        if (
            self.x_mask.overlaps(self.y_mask)
            or self.x_mask.overlaps(self.z_mask)
            or self.y_mask.overlaps(self.z_mask)
        ):
            raise ValidationError(f"Masks overlap: x={self.x_mask} y={self.y_mask} z={self.z_mask}")

    def swapped(self) -> WireGroups:
        return WireGroups(self.y_mask, self.x_mask, self.z_mask)


def regroup(omega: State, groups: WireGroups) -> State:
    """Marginal of ω on the three groups, wires ordered X, then Y, then Z."""
    groups.x_mask.require_length(omega.space.wires)
    order = groups.x_mask.indices + groups.y_mask.indices + groups.z_mask.indices
    full = Mask.from_indices(omega.space.wires, order)
    kept = full.indices
    # positions of the wanted order inside the marginal's own (sorted) wire order
    return reorder(marginal(omega, full), [kept.index(i) for i in order])


def _group_sizes(omega: State, groups: WireGroups) -> tuple[int, int, int]:
    nx, ny, nz = (
        int(np.prod([len(f) for f, bit in zip(omega.space.factors, mask.bits) if bit]))
        for mask in (groups.x_mask, groups.y_mask, groups.z_mask)
    )
    return nx, ny, nz


def _group_table(omega: State, groups: WireGroups) -> np.ndarray:
    return regroup(omega, groups).weights.reshape(_group_sizes(omega, groups))


def _within_conditional(gap: np.ndarray, p_z: np.ndarray, eps: float) -> bool:
    """A joint-scale gap on X ⊗ Y ⊗ Z, judged at the scale of P(x, y | z) where P(z) > eps."""
    support = p_z > eps
    return bool(np.all(np.abs(gap[:, :, support]) <= eps * p_z[support]))


def cond_indep(omega: State, groups: WireGroups, eps: float = CI_EPS) -> bool:
    """P(x,y|z) = P(x|z)·P(y|z) on every z with mass above eps.

    Checked in the division-free form P(x,y,z)·P(z) = P(x,z)·P(y,z), with the
    tolerance scaled by P(z)².
    """
    table = _group_table(omega, groups)
    p_z = table.sum(axis=(0, 1))
    p_xz = table.sum(axis=1)
    p_yz = table.sum(axis=0)
    lhs = table * p_z[None, None, :]
    rhs = p_xz[:, None, :] * p_yz[None, :, :]
    support = p_z > eps
    gap = np.abs(lhs - rhs)[:, :, support]
    return bool(np.all(gap <= eps * p_z[support] ** 2))


def _conditional(grouped: State, outputs: Mask, inputs: Mask) -> Channel:
    """ω[outputs | inputs] on a regrouped state; an empty input selection conditions on nothing."""
    union = outputs | inputs
    restricted = marginal(grouped, union)
    if inputs.is_empty():
        return state_as_channel(restricted)
    return disintegrate(restricted, inputs.restrict(union)).channel


def ci_formulation(
    omega: State,
    groups: WireGroups,
    which: Formulation,
    eps: float = CI_EPS,
) -> bool:
    """One of four equivalent CI checks; all of them bound |P(x,y|z) - P(x|z)·P(y|z)| by eps."""
    grouped = regroup(omega, groups)
    sizes = _group_sizes(omega, groups)
    nx, ny, nz = groups.x_mask.count, groups.y_mask.count, groups.z_mask.count
    total = nx + ny + nz
    x = Mask.from_indices(total, range(nx))
    y = Mask.from_indices(total, range(nx, nx + ny))
    z = Mask.from_indices(total, range(nx + ny, total))
    z_space = grouped.space.select(z.bits)
    omega_z = marginal(grouped, z)
    p_z = omega_z.flat
    c_x = _conditional(grouped, x, z)

    if which is Formulation.COND_FACTOR:
        c_xy = _conditional(grouped, x | y, z)
        c_y = _conditional(grouped, y, z)
        product = compose(tensor(c_x, c_y), copier(z_space))
        return almost_equal(c_xy, product, omega_z, eps)

    if which is Formulation.FACTORIZE3:
        c_y = _conditional(grouped, y, z)
        triple = compose(tensor(tensor(c_x, c_y), identity(z_space)), copier(z_space, 3))
        rebuilt = state_transform(triple, omega_z)
        return _within_conditional((rebuilt.flat - grouped.flat).reshape(sizes), p_z, eps)

    yz = y | z
    omega_yz = marginal(grouped, yz)
    drop_y = compose(c_x, projection(omega_yz.space, z.restrict(yz).bits))

    if which is Formulation.DROP_Y:
        c_x_yz = _conditional(grouped, x, yz)
        # rows are (y, z); weighting by P(y, z) puts the gap on the joint scale
        gap = (c_x_yz.matrix - drop_y.matrix) * omega_yz.flat[:, None]
        return _within_conditional(gap.T.reshape(sizes), p_z, eps)

    if which is Formulation.FACTOR_PAIR:
        rebuilt = integrate(omega_yz, drop_y)
        # integrate yields Y, Z, X; move X to the front
        rebuilt = reorder(rebuilt, list(range(ny + nz, total)) + list(range(ny + nz)))
        return _within_conditional((rebuilt.flat - grouped.flat).reshape(sizes), p_z, eps)

    raise ValidationError(f"Unknown formulation: {which}")
