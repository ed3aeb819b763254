from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from channel_inference.algebra import (
    Channel,
    Scalar,
    State,
    channel_as_state,
    compose,
    copier,
    discarder,
    distance,
    identity,
    is_causal,
    permute_wires,
    point_state,
    projection,
    scale,
    state_as_channel,
    state_from_rows,
    state_transform,
    swap,
    tensor,
    tensor_states,
    tuple_channels,
    uniform_state,
)
from channel_inference.errors import DimensionError, ValidationError
from channel_inference.sampling import random_channel, random_state
from channel_inference.spaces import UNIT, ProductSpace, Space

TOL = 1e-12

seeds = st.integers(min_value=0, max_value=2**32 - 1)
sizes = st.integers(min_value=1, max_value=4)


def _space(name: str, n: int) -> Space:
    return Space(name, tuple(f"{name.lower()}{i}" for i in range(n)))


def _deterministic(dom: Space, cod: Space, rng: np.random.Generator) -> Channel:
    targets = rng.integers(0, len(cod), size=len(dom))
    return Channel(dom, cod, np.eye(len(cod))[targets])


@settings(max_examples=60, deadline=None)
@given(seed=seeds, a=sizes, b=sizes, c=sizes, d=sizes)
def test_composition_is_associative_and_unital(seed: int, a: int, b: int, c: int, d: int) -> None:
    rng = np.random.default_rng(seed)
    A, B, C, D = _space("A", a), _space("B", b), _space("C", c), _space("D", d)
    f, g, h = random_channel(rng, A, B), random_channel(rng, B, C), random_channel(rng, C, D)
    assert distance(compose(h, compose(g, f)), compose(compose(h, g), f)) <= TOL
    assert distance(compose(f, identity(A)), f) <= TOL
    assert distance(compose(identity(B), f), f) <= TOL


@settings(max_examples=60, deadline=None)
@given(seed=seeds, a=sizes, b=sizes, c=sizes, d=sizes)
def test_tensor_interchange_law(seed: int, a: int, b: int, c: int, d: int) -> None:
    rng = np.random.default_rng(seed)
    A, B, C, D = _space("A", a), _space("B", b), _space("C", c), _space("D", d)
    f1, g1 = random_channel(rng, A, B), random_channel(rng, B, A)
    f2, g2 = random_channel(rng, C, D), random_channel(rng, D, C)
    left = compose(tensor(g1, g2), tensor(f1, f2))
    right = tensor(compose(g1, f1), compose(g2, f2))
    assert distance(left, right) <= TOL


@settings(max_examples=60, deadline=None)
@given(a=sizes, b=sizes)
def test_copy_discard_comonoid_laws(a: int, b: int) -> None:
    A = _space("A", a)
    copy = copier(A)
    assert distance(compose(tensor(discarder(A), identity(A)), copy), identity(A)) <= TOL
    assert distance(compose(tensor(identity(A), discarder(A)), copy), identity(A)) <= TOL
    assert distance(compose(tensor(copy, identity(A)), copy), compose(tensor(identity(A), copy), copy)) <= TOL
    assert distance(compose(swap(A, A), copy), copy) <= TOL

    B = _space("B", b)
    AB = ProductSpace.of(A, B)
    shuffled = compose(permute_wires(ProductSpace.of(A, A, B, B), (0, 2, 1, 3)), tensor(copier(A), copier(B)))
    assert distance(copier(AB), shuffled) <= TOL
    assert distance(tensor(discarder(A), discarder(B)), discarder(AB)) <= TOL


def test_copier_counts() -> None:
    A = _space("A", 3)
    assert distance(copier(A, 1), identity(A)) <= TOL
    assert distance(copier(A, 0), discarder(A)) <= TOL
    triple = copier(A, 3)
    assert triple.row("a2")[("a2", "a2", "a2")] == 1.0
    assert triple.row("a2").mass == 1.0


@settings(max_examples=60, deadline=None)
@given(seed=seeds, a=sizes, b=sizes)
def test_discard_is_natural_for_causal_channels(seed: int, a: int, b: int) -> None:
    rng = np.random.default_rng(seed)
    A, B = _space("A", a), _space("B", b)
    c = random_channel(rng, A, B)
    assert distance(compose(discarder(B), c), discarder(A)) <= TOL


def test_copy_is_natural_only_for_deterministic_channels() -> None:
    rng = np.random.default_rng(7)
    A, B = _space("A", 3), _space("B", 3)
    noisy = random_channel(rng, A, B)
    assert distance(compose(copier(B), noisy), compose(tensor(noisy, noisy), copier(A))) > 1e-3
    sharp = _deterministic(A, B, rng)
    assert distance(compose(copier(B), sharp), compose(tensor(sharp, sharp), copier(A))) <= TOL


def test_swap_is_an_involution() -> None:
    A, B = _space("A", 2), _space("B", 3)
    assert distance(compose(swap(B, A), swap(A, B)), identity(ProductSpace.of(A, B))) <= TOL


def test_projection_keeps_masked_wires() -> None:
    rng = np.random.default_rng(3)
    A, B, C = _space("A", 2), _space("B", 3), _space("C", 2)
    x, y, z = random_state(rng, A), random_state(rng, B), random_state(rng, C)
    joint = tensor_states(x, y, z)
    kept = state_transform(projection(joint.space, (True, False, True)), joint)
    assert distance(kept, tensor_states(x, z)) <= TOL
    dropped = state_transform(projection(joint.space, (False, False, False)), joint)
    assert dropped.space == UNIT
    assert dropped.mass == pytest.approx(1.0)


def test_state_transform_is_composition_with_a_state() -> None:
    rng = np.random.default_rng(11)
    A, B = _space("A", 3), _space("B", 4)
    sigma, c = random_state(rng, A), random_channel(rng, A, B)
    via_compose = channel_as_state(compose(c, state_as_channel(sigma)))
    assert distance(state_transform(c, sigma), via_compose) <= TOL


def test_tupling_copies_the_input() -> None:
    A = _space("A", 2)
    B, C = _space("B", 2), _space("C", 3)
    f = Channel.from_rows(A, B, {"a0": [0.25, 0.75], "a1": [1.0, 0.0]})
    g = Channel.from_rows(A, C, {"a0": [0.5, 0.5, 0.0], "a1": [0.0, 0.0, 1.0]})
    t = tuple_channels(f, g)
    assert t.cod == ProductSpace.of(B, C)
    assert t.row("a0")[("b1", "c0")] == pytest.approx(0.375)
    assert t.row("a1")[("b0", "c2")] == pytest.approx(1.0)
    assert is_causal(t)


def test_compose_rejects_mismatched_wires() -> None:
    A, B = _space("A", 2), _space("B", 2)
    c = identity(A)
    with pytest.raises(DimensionError, match="A"):
        compose(identity(B), c)


def test_tables_are_validated_and_frozen() -> None:
    A = _space("A", 2)
    with pytest.raises(ValidationError):
        State(A, [0.5, -0.5])
    with pytest.raises(ValidationError):
        State(A, [np.nan, 1.0])
    with pytest.raises(DimensionError):
        State(A, [1.0, 0.0, 0.0])
    state = State(A, [0.5, 0.5])
    with pytest.raises(ValueError):
        state.weights[0] = 1.0


def test_scalars_and_scaling() -> None:
    A = _space("A", 2)
    with pytest.raises(ValidationError):
        Scalar(-1.0)
    half = scale(uniform_state(A), Scalar(0.5))
    assert half.mass == pytest.approx(0.5)
    assert not is_causal(half)


def test_state_from_rows_counts_multiplicity() -> None:
    A, B = _space("A", 2), _space("B", 2)
    rows = [("a0", "b0"), ("a0", "b0"), ("a1", "b1"), ("a0", "b1")]
    state = state_from_rows(ProductSpace.of(A, B), rows)
    assert state[("a0", "b0")] == 0.5
    assert state[("a0", "b1")] == 0.25
    assert state[("a1", "b0")] == 0.0
    with pytest.raises(ValidationError):
        state_from_rows(ProductSpace.of(A, B), [])


def test_point_state() -> None:
    A = _space("A", 3)
    assert point_state(A, "a1").flat.tolist() == [0.0, 1.0, 0.0]
