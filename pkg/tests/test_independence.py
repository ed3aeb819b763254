from __future__ import annotations

import numpy as np
import pytest

from channel_inference.algebra import State, tensor_states
from channel_inference.errors import ValidationError
from channel_inference.independence import Formulation, WireGroups, ci_formulation, cond_indep, regroup
from channel_inference.masks import Mask, parse_mask
from channel_inference.sampling import random_state
from channel_inference.spaces import ProductSpace, Space

X_MASK, Y_MASK, Z_MASK = Mask.of(1, 0, 0), Mask.of(0, 1, 0), Mask.of(0, 0, 1)
XYZ = WireGroups(X_MASK, Y_MASK, Z_MASK)


def _space(name: str, n: int) -> Space:
    return Space(name, tuple(f"{name.lower()}{i}" for i in range(n)))


def _rows(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.dirichlet(np.ones(cols), size=rows)


def _sizes(rng: np.random.Generator, k: int) -> list[int]:
    return [int(n) for n in rng.integers(1, 4, size=k)]


def _common_cause(rng: np.random.Generator) -> State:
    """ω(x, y, z) = ω_Z(z)·c(z)(x)·d(z)(y)."""
    nx, ny, nz = _sizes(rng, 3)
    pz = rng.dirichlet(np.ones(nz))
    if nz > 1 and rng.random() < 0.3:
        pz[0] = 0.0
        pz /= pz.sum()
    weights = np.einsum("z,zx,zy->xyz", pz, _rows(rng, nz, nx), _rows(rng, nz, ny))
    return State(ProductSpace.of(_space("X", nx), _space("Y", ny), _space("Z", nz)), weights)


def _entwined(rng: np.random.Generator) -> State:
    """X and Y are copies of one hidden variable given Z, so they stay dependent."""
    n, nz = int(rng.integers(2, 4)), int(rng.integers(1, 4))
    pz = rng.dirichlet(np.ones(nz))
    shared = _rows(rng, nz, n)
    weights = np.einsum("z,zx,xy->xyz", pz, shared, np.eye(n))
    return State(ProductSpace.of(_space("X", n), _space("Y", n), _space("Z", nz)), weights)


def _all_formulations(omega: State, groups: WireGroups) -> list[bool]:
    return [ci_formulation(omega, groups, which) for which in Formulation]


def test_disease_mood_is_not_independent() -> None:
    M, D = _space("M", 2), _space("D", 2)
    omega = State(ProductSpace.of(M, D), [0.05, 0.4, 0.5, 0.05])
    groups = WireGroups(Mask.of(1, 0), Mask.of(0, 1), parse_mask("", wires=2))
    assert cond_indep(omega, groups) is False
    assert _all_formulations(omega, groups) == [False] * 4


def test_product_state_is_independent_with_empty_z() -> None:
    rng = np.random.default_rng(1)
    omega = tensor_states(random_state(rng, _space("A", 3)), random_state(rng, _space("B", 2)))
    groups = WireGroups(Mask.of(1, 0), Mask.of(0, 1), Mask.of(0, 0))
    assert cond_indep(omega, groups)
    assert _all_formulations(omega, groups) == [True] * 4


def test_formulations_agree_on_300_states() -> None:
    rng = np.random.default_rng(300)
    roles = [(0, 1, 2), (1, 0, 2), (2, 0, 1), (0, 2, 1)]
    for i in range(300):
        if i % 3 == 0:
            omega, truth = _common_cause(rng), True
        elif i % 3 == 1:
            omega, truth = _entwined(rng), False
        else:
            nx, ny, nz = (int(n) for n in rng.integers(2, 4, size=3))
            space = ProductSpace.of(_space("X", nx), _space("Y", ny), _space("Z", nz))
            omega, truth = random_state(rng, space), False
        x, y, z = roles[i % len(roles)]
        order = np.argsort([x, y, z])
        permuted = State(omega.space.permuted(list(order)), omega.weights.transpose(list(order)))
        groups = WireGroups(Mask.from_indices(3, [x]), Mask.from_indices(3, [y]), Mask.from_indices(3, [z]))
        answers = _all_formulations(permuted, groups)
        assert answers == [truth] * 4, (i, answers)
        assert cond_indep(permuted, groups) is truth


def test_low_mass_z_dependence_is_judged_at_the_conditional_scale() -> None:
    independent_z0 = 0.99 * np.outer([0.3, 0.7], [0.6, 0.4])
    nudge = 5e-6 * np.array([[1.0, -1.0], [-1.0, 1.0]])
    dependent_z1 = 0.01 * (np.full((2, 2), 0.25) + nudge)
    weights = np.stack([independent_z0, dependent_z1], axis=-1)
    omega = State(ProductSpace.of(_space("X", 2), _space("Y", 2), _space("Z", 2)), weights)
    assert cond_indep(omega, XYZ) is False
    assert _all_formulations(omega, XYZ) == [False] * 4


def test_perturbed_common_cause_fails_every_formulation() -> None:
    rng = np.random.default_rng(106)
    space = ProductSpace.of(_space("X", 2), _space("Y", 2), _space("Z", 2))
    for _ in range(100):
        pz = rng.dirichlet(np.ones(2))
        weights = np.einsum("z,zx,zy->xyz", pz, _rows(rng, 2, 2), _rows(rng, 2, 2))
        assert cond_indep(State(space, weights), XYZ)
        weights[0, 0, 0] += 0.05
        omega = State(space, weights / weights.sum())
        assert cond_indep(omega, XYZ) is False
        assert _all_formulations(omega, XYZ) == [False] * 4


def test_regroup_orders_wires_x_y_z() -> None:
    rng = np.random.default_rng(2)
    space = ProductSpace.of(_space("A", 2), _space("B", 3), _space("C", 2), _space("E", 2))
    omega = random_state(rng, space)
    groups = WireGroups(Mask.of(0, 0, 1, 0), Mask.of(1, 0, 0, 0), Mask.of(0, 1, 0, 0))
    grouped = regroup(omega, groups)
    assert grouped.space.names == ("C", "A", "B")
    expected = omega.weights.sum(axis=3).transpose(2, 0, 1)
    assert np.allclose(grouped.weights, expected)


@pytest.mark.parametrize(
    "x,y,z",
    [
        ("1,0,0", "1,1,0", "0,0,1"),
        ("0,0,0", "0,1,0", "0,0,1"),
        ("1,0", "0,1,0", "0,0,1"),
    ],
)
def test_wire_groups_validation(x: str, y: str, z: str) -> None:
    with pytest.raises(ValidationError):
        WireGroups(parse_mask(x), parse_mask(y), parse_mask(z))


# Four-wire premises, wires ordered X, Y, W, Z.
X4, Y4, W4, Z4 = Mask.of(1, 0, 0, 0), Mask.of(0, 1, 0, 0), Mask.of(0, 0, 1, 0), Mask.of(0, 0, 0, 1)


def _four_wire(weights: np.ndarray) -> State:
    nx, ny, nw, nz = weights.shape
    return State(
        ProductSpace.of(_space("X", nx), _space("Y", ny), _space("W", nw), _space("Z", nz)),
        weights,
    )


def _x_indep_yw_given_z(rng: np.random.Generator) -> State:
    nx, ny, nw, nz = _sizes(rng, 4)
    pz = rng.dirichlet(np.ones(nz))
    yw = _rows(rng, nz, ny * nw).reshape(nz, ny, nw)
    return _four_wire(np.einsum("z,zx,zyw->xywz", pz, _rows(rng, nz, nx), yw))


def test_graphoid_symmetry() -> None:
    rng = np.random.default_rng(101)
    for _ in range(100):
        omega = _common_cause(rng)
        assert cond_indep(omega, XYZ)
        assert cond_indep(omega, XYZ.swapped())


def test_graphoid_decomposition() -> None:
    rng = np.random.default_rng(102)
    for _ in range(100):
        omega = _x_indep_yw_given_z(rng)
        assert cond_indep(omega, WireGroups(X4, Y4 | W4, Z4))
        assert cond_indep(omega, WireGroups(X4, Y4, Z4))
        assert cond_indep(omega, WireGroups(X4, W4, Z4))


def test_graphoid_weak_union() -> None:
    rng = np.random.default_rng(103)
    for _ in range(100):
        omega = _x_indep_yw_given_z(rng)
        assert cond_indep(omega, WireGroups(X4, Y4, Z4 | W4))
        assert cond_indep(omega, WireGroups(X4, W4, Z4 | Y4))


def test_graphoid_contraction() -> None:
    rng = np.random.default_rng(104)
    for _ in range(100):
        nx, ny, nw, nz = _sizes(rng, 4)
        pz = rng.dirichlet(np.ones(nz))
        w_given_yz = rng.dirichlet(np.ones(nw), size=(ny, nz))
        weights = np.einsum("z,zx,zy,yzw->xywz", pz, _rows(rng, nz, nx), _rows(rng, nz, ny), w_given_yz)
        omega = _four_wire(weights)
        assert cond_indep(omega, WireGroups(X4, Y4, Z4))
        assert cond_indep(omega, WireGroups(X4, W4, Y4 | Z4))
        assert cond_indep(omega, WireGroups(X4, Y4 | W4, Z4))


def test_dependence_is_detected_beyond_tolerance() -> None:
    rng = np.random.default_rng(105)
    for _ in range(50):
        assert not cond_indep(_entwined(rng), XYZ)
