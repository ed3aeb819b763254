"""Density-represented channels from a finite space to the real line.

A channel c : P → ℝ is given by a likelihood ℓ(p, y) against a reference measure ν,
c(p)(B) = ∫_B ℓ(p, y) ν(dy). Observations are points, so inversion evaluates the
densities at the observed values instead of integrating over a set.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

import numpy as np
from scipy import integrate, stats

from channel_inference.algebra import Channel, State
from channel_inference.constants import (
    DEFAULT_EPS,
    DENSITY_NORMALIZATION_TOL,
    GAUSSIAN_SUPPORT_SIGMAS,
    QUADRATURE_STEPS,
)
from channel_inference.disintegration import bayes_invert
from channel_inference.effects import Effect
from channel_inference.errors import (
    DensityError,
    DimensionError,
    FeatureSpecError,
    ImpossibleObservationError,
    ValidationError,
)
from channel_inference.spaces import Space, require_same

logger = logging.getLogger(__name__)

Observation = str | float


def gaussian_density(mean: float, stddev: float, x: float | np.ndarray) -> float | np.ndarray:
    if not stddev > 0:
        raise DensityError(f"Gaussian stddev must be positive, got {stddev}")
    value = stats.norm.pdf(x, loc=mean, scale=stddev)
    return float(value) if np.ndim(value) == 0 else value


def quadrature(
    f: Callable[[np.ndarray], np.ndarray | float],
    lo: float,
    hi: float,
    n: int = QUADRATURE_STEPS,
) -> float:
    """Composite Simpson estimate of ∫_lo^hi f with n (even) subintervals."""
    if n < 2 or n % 2:
        raise DensityError(f"Simpson needs an even number of subintervals >= 2, got {n}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DensityError(f"Invalid integration bounds [{lo}, {hi}]")
    grid = np.linspace(lo, hi, n + 1)
    values = np.asarray(f(grid), dtype=float)
    if values.shape != grid.shape:
        values = np.broadcast_to(values, grid.shape)
    return float(integrate.simpson(values, x=grid))


@dataclass(frozen=True)
class GaussianDensity:
    mean: float
    stddev: float

    def __post_init__(self) -> None:
        if not self.stddev > 0:
            raise DensityError(f"Gaussian stddev must be positive, got {self.stddev}")

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        return gaussian_density(self.mean, self.stddev, x)

    def support(self, sigmas: float = GAUSSIAN_SUPPORT_SIGMAS) -> tuple[float, float]:
        return self.mean - sigmas * self.stddev, self.mean + sigmas * self.stddev

    def integral(self, lo: float, hi: float, steps: int = QUADRATURE_STEPS) -> float:
        a, b = self.support()
        return quadrature(self, max(lo, a), min(hi, b), steps)


@dataclass(frozen=True, eq=False)
class TabulatedDensity:
    """Piecewise-linear density through (xs, ys), zero outside [xs[0], xs[-1]]."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        xs = np.array(self.xs, dtype=float)
        ys = np.array(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise DensityError("Tabulated density needs matching 1D knot arrays of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise DensityError("Tabulated density knots must be strictly increasing")
        if np.any(ys < 0) or not np.all(np.isfinite(ys)):
            raise DensityError("Tabulated density values must be finite and nonnegative")
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        value = np.interp(x, self.xs, self.ys, left=0.0, right=0.0)
        return float(value) if np.ndim(value) == 0 else value

    def support(self) -> tuple[float, float]:
        return float(self.xs[0]), float(self.xs[-1])

    def integral(self, lo: float, hi: float, steps: int = QUADRATURE_STEPS) -> float:
        a, b = max(lo, self.xs[0]), min(hi, self.xs[-1])
        if a >= b:
            return 0.0
        inside = self.xs[(self.xs > a) & (self.xs < b)]
        knots = np.concatenate(([a], inside, [b]))
        return float(integrate.trapezoid(self(knots), x=knots))


@dataclass(frozen=True)
class CountingDensity:
    """Likelihood of a discrete channel row against the counting measure."""

    values: Mapping[str, float]

    def __call__(self, label: str) -> float:
        return float(self.values.get(str(label), 0.0))


Density = GaussianDensity | TabulatedDensity | CountingDensity


class MeasureKind(str, Enum):
    LEBESGUE_INTERVAL = "lebesgue"
    COUNTING = "counting"


@dataclass(frozen=True)
class ReferenceMeasure:
    kind: MeasureKind
    lo: float = -math.inf
    hi: float = math.inf
    space: Space | None = None

    def __post_init__(self) -> None:
        if self.kind is MeasureKind.LEBESGUE_INTERVAL and not self.lo < self.hi:
            raise DensityError(f"Reference interval needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.kind is MeasureKind.COUNTING and self.space is None:
            raise DensityError("Counting reference measure needs a space")

    @classmethod
    def lebesgue(cls, lo: float = -math.inf, hi: float = math.inf) -> ReferenceMeasure:
        return cls(MeasureKind.LEBESGUE_INTERVAL, lo=lo, hi=hi)

    @classmethod
    def counting(cls, space: Space) -> ReferenceMeasure:
        return cls(MeasureKind.COUNTING, space=space)

    def total(self, density: Density, steps: int = QUADRATURE_STEPS) -> float:
        if self.kind is MeasureKind.COUNTING:
            assert self.space is not None
            return float(sum(density(label) for label in self.space.labels))
        if isinstance(density, CountingDensity):
            raise DensityError("A counting density cannot be integrated against Lebesgue measure")
        return density.integral(self.lo, self.hi, steps)


@dataclass(frozen=True, eq=False)
class DensityFamily:
    """One density per input label: a likelihood relation for a channel out of input_space."""

    input_space: Space
    densities: Mapping[str, Density]
    reference: ReferenceMeasure = field(default_factory=ReferenceMeasure.lebesgue)
    name: str = "feature"
    steps: int = QUADRATURE_STEPS

    def __post_init__(self) -> None:
        missing = [label for label in self.input_space.labels if label not in self.densities]
        extra = [label for label in self.densities if label not in self.input_space.labels]
        if missing or extra:
            raise DimensionError(
                f"Density family '{self.name}' must cover exactly {', '.join(self.input_space.labels)}"
            )
        for label, density in self.densities.items():
            mass = self.reference.total(density, self.steps)
            if abs(mass - 1.0) > DENSITY_NORMALIZATION_TOL:
                raise DensityError(
                    f"Density for '{label}' in '{self.name}' integrates to {mass:.9f}, not 1"
                )

    @classmethod
    def gaussian(
        cls,
        input_space: Space,
        params: Mapping[str, tuple[float, float]],
        name: str = "feature",
        steps: int = QUADRATURE_STEPS,
    ) -> DensityFamily:
        densities = {label: GaussianDensity(mean, stddev) for label, (mean, stddev) in params.items()}
        return cls(input_space, densities, ReferenceMeasure.lebesgue(), name, steps)

    @classmethod
    def from_channel(cls, c: Channel, name: str = "feature") -> DensityFamily:
        """The likelihood relation of a discrete channel w.r.t. the counting measure."""
        if c.dom.wires != 1 or c.cod.wires != 1:
            raise DimensionError("from_channel needs a channel between single spaces")
        source, target = c.dom.factors[0], c.cod.factors[0]
        densities = {
            label: CountingDensity(dict(zip(target.labels, c.matrix[i].tolist())))
            for i, label in enumerate(source.labels)
        }
        return cls(source, densities, ReferenceMeasure.counting(target), name)

    def likelihood(self, label: str, y: Observation) -> float:
        density = self.densities[label]
        if isinstance(density, CountingDensity):
            return density(str(y))
        return float(density(float(y)))

    def support(self) -> tuple[float, float]:
        bounds = [d.support() for d in self.densities.values() if not isinstance(d, CountingDensity)]
        if not bounds:
            raise DensityError(f"Density family '{self.name}' has no continuous support")
        lo = min(a for a, _ in bounds)
        hi = max(b for _, b in bounds)
        return max(lo, self.reference.lo), min(hi, self.reference.hi)


class FeatureEvaluator(Protocol):
    name: str

    def likelihood(self, class_label: str, observed: Observation) -> float: ...


@dataclass(frozen=True, eq=False)
class DiscreteFeature:
    channel: Channel
    name: str = "feature"

    def __post_init__(self) -> None:
        if self.channel.dom.wires != 1 or self.channel.cod.wires != 1:
            raise DimensionError(f"Feature '{self.name}' needs a channel between single spaces")

    def likelihood(self, class_label: str, observed: Observation) -> float:
        return self.channel.row(class_label)[str(observed)]


@dataclass(frozen=True, eq=False)
class DensityFeature:
    family: DensityFamily

    @property
    def name(self) -> str:
        return self.family.name

    def likelihood(self, class_label: str, observed: Observation) -> float:
        if self.family.reference.kind is MeasureKind.LEBESGUE_INTERVAL:
            try:
                observed = float(observed)
            except (TypeError, ValueError):
                raise ValidationError(f"Feature '{self.name}' expects a number, got '{observed}'") from None
        return self.family.likelihood(class_label, observed)


def _class_space(prior: State) -> Space:
    if prior.space.wires != 1:
        raise DimensionError(f"Prior must live on a single space, got {prior.space.describe()}")
    return prior.space.factors[0]


def likelihood_invert(
    prior: State,
    features: Sequence[FeatureEvaluator],
    observation: Sequence[Observation],
    eps: float = DEFAULT_EPS,
) -> State:
    """posterior(p) ∝ prior(p)·∏ᵢ ℓᵢ(p, obsᵢ)."""
    classes = _class_space(prior)
    if len(features) != len(observation):
        raise DimensionError(f"Observation has {len(observation)} values for {len(features)} features")
    weights = prior.flat.copy()
    for feature, observed in zip(features, observation):
        weights *= np.array([feature.likelihood(label, observed) for label in classes.labels])
    denominator = float(weights.sum())
    if denominator <= eps:
        raise ImpossibleObservationError(
            f"Observation ({', '.join(str(v) for v in observation)}) has likelihood {denominator:g} under every class"
        )
    return State(prior.space, weights / denominator)


def almost_inverse(p: Effect, support_eps: float = 0.0) -> Effect:
    """Pointwise reciprocal where p > support_eps, 0 elsewhere."""
    values = p.flat
    inverse = np.zeros_like(values)
    support = values > support_eps
    inverse[support] = 1.0 / values[support]
    return Effect(p.space, inverse)


def is_almost_inverse(p: Effect, q: Effect, sigma: State, eps: float = 1e-12) -> bool:
    """p·q ≡σ 𝟙: the product is 1 wherever σ has mass."""
    require_same(p.space, q.space, "is_almost_inverse")
    require_same(p.space, sigma.space, "is_almost_inverse")
    support = (sigma.flat > 0) & (p.flat > 0)
    return bool(np.all(np.abs(p.flat[support] * q.flat[support] - 1.0) <= eps))


@dataclass(frozen=True, eq=False)
class Discretization:
    channel: Channel
    edges: np.ndarray

    def label_of(self, y: float) -> str:
        n = len(self.edges) - 1
        if not self.edges[0] <= y <= self.edges[-1]:
            raise ValidationError(f"{y} lies outside the grid [{self.edges[0]}, {self.edges[-1]}]")
        index = min(int(np.searchsorted(self.edges, y, side="right")) - 1, n - 1)
        return self.channel.cod.factors[0].labels[index]


def discretize(family: DensityFamily, n_bins: int, lo: float | None = None, hi: float | None = None) -> Discretization:
    """Channel onto an n-bin grid over [lo, hi]; bin masses by Simpson, rows renormalized."""
    if n_bins < 1:
        raise ValidationError("Need at least one bin")
    default_lo, default_hi = family.support()
    lo = default_lo if lo is None else lo
    hi = default_hi if hi is None else hi
    edges = np.linspace(lo, hi, n_bins + 1)
    mids = (edges[:-1] + edges[1:]) / 2
    widths = np.diff(edges)
    grid = Space(f"{family.name} bins", tuple(f"b{i}" for i in range(n_bins)))
    rows = []
    for label in family.input_space.labels:
        density = family.densities[label]
        mass = widths / 6 * (density(edges[:-1]) + 4 * density(mids) + density(edges[1:]))
        rows.append(mass / mass.sum())
    return Discretization(Channel(family.input_space, grid, np.array(rows)), edges)


def discretized_posterior(
    prior: State,
    features: Sequence[FeatureEvaluator],
    observation: Sequence[Observation],
    n_bins: int = 4096,
) -> State:
    """Feature-by-feature discrete Bayesian inversion, densities replaced by n-bin grids."""
    _class_space(prior)
    if len(features) != len(observation):
        raise DimensionError(f"Observation has {len(observation)} values for {len(features)} features")
    posterior = prior
    for feature, observed in zip(features, observation):
        if isinstance(feature, DiscreteFeature):
            c, point = feature.channel, str(observed)
        elif isinstance(feature, DensityFeature) and feature.family.reference.kind is MeasureKind.COUNTING:
            c, point = _channel_of(feature.family), str(observed)
        elif isinstance(feature, DensityFeature):
            grid = discretize(feature.family, n_bins)
            c, point = grid.channel, grid.label_of(float(observed))
        else:
            raise ValidationError(f"Cannot discretize feature '{feature.name}'")
        posterior = bayes_invert(posterior, c).row(point)
        logger.debug("after %s: %s", feature.name, posterior.flat)
    return posterior


def _channel_of(family: DensityFamily) -> Channel:
    target = family.reference.space
    assert target is not None
    rows = [[family.likelihood(label, y) for y in target.labels] for label in family.input_space.labels]
    return Channel(family.input_space, target, np.array(rows))


@dataclass(frozen=True)
class GaussianSpec:
    feature: str
    class_label: str
    mean: float
    stddev: float


def parse_feature_spec(raw: str) -> GaussianSpec:
    """Parses "feature=temperature;class=y;mean=73;stddev=6.2"."""
    fields: dict[str, str] = {}
    for part in raw.strip().split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise FeatureSpecError(f"Invalid feature spec entry '{part.strip()}'. Use key=value")
        key, value = part.split("=", maxsplit=1)
        fields[key.strip().lower()] = value.strip()
    missing = [key for key in ("feature", "class", "mean", "stddev") if not fields.get(key)]
    if missing:
        raise FeatureSpecError(f"Feature spec '{raw.strip()}' is missing: {', '.join(missing)}")
    try:
        mean = float(fields["mean"])
        stddev = float(fields["stddev"])
    except ValueError:
        raise FeatureSpecError(f"Feature spec '{raw.strip()}' has a non-numeric mean or stddev") from None
    if not stddev > 0 or not math.isfinite(mean):
        raise FeatureSpecError(f"Feature spec '{raw.strip()}' needs a finite mean and positive stddev")
    return GaussianSpec(fields["feature"], fields["class"], mean, stddev)


def parse_feature_specs(text: str) -> list[GaussianSpec]:
    return [
        parse_feature_spec(line)
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
