"""Random spaces, states, channels and effects for the property suites."""

from __future__ import annotations

import numpy as np

from channel_inference.algebra import Channel, State
from channel_inference.effects import Effect
from channel_inference.spaces import ProductSpace, Space, as_product


def random_space(rng: np.random.Generator, name: str, max_size: int = 4) -> Space:
    size = int(rng.integers(1, max_size + 1))
    return Space(name, tuple(f"{name.lower()}{i}" for i in range(size)))


def random_product_space(
    rng: np.random.Generator,
    min_wires: int = 1,
    max_wires: int = 4,
    max_size: int = 4,
) -> ProductSpace:
    wires = int(rng.integers(min_wires, max_wires + 1))
    return ProductSpace.of(*(random_space(rng, f"W{i}", max_size) for i in range(wires)))


def _dirichlet_rows(rng: np.random.Generator, rows: int, cols: int, sparsity: float) -> np.ndarray:
    table = rng.dirichlet(np.ones(cols), size=rows)
    if sparsity > 0:
        keep = rng.random((rows, cols)) >= sparsity
        # never zero a whole row
        keep[np.arange(rows), rng.integers(0, cols, size=rows)] = True
        table = table * keep
        table /= table.sum(axis=1, keepdims=True)
    return table


def random_state(rng: np.random.Generator, space: Space | ProductSpace, sparsity: float = 0.0) -> State:
    """Dirichlet(1, ..., 1) weights; with sparsity > 0 each entry is zeroed with that probability."""
    space = as_product(space)
    return State(space, _dirichlet_rows(rng, 1, space.size, sparsity)[0])


def random_channel(
    rng: np.random.Generator,
    dom: Space | ProductSpace,
    cod: Space | ProductSpace,
    sparsity: float = 0.0,
) -> Channel:
    dom, cod = as_product(dom), as_product(cod)
    return Channel(dom, cod, _dirichlet_rows(rng, dom.size, cod.size, sparsity))


def random_effect(rng: np.random.Generator, space: Space | ProductSpace, scale: float = 1.0) -> Effect:
    space = as_product(space)
    return Effect(space, rng.random(space.size) * scale)
