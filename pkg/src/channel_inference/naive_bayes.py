"""Naive Bayes as channel extraction plus inversion.

Fitting extracts one channel class → feature per feature column by disintegration
(or a Gaussian per class for numeric features in hybrid mode). Classification
inverts the tupled feature channel along the class prior at the observed tuple,
or uses the density form of inversion once any feature is Gaussian.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field
from pydantic import ValidationError as PydanticValidationError

from channel_inference.algebra import Channel, State, tuple_channels
from channel_inference.constants import DEFAULT_EPS, QUADRATURE_STEPS
from channel_inference.data_table import DataTable
from channel_inference.disintegration import bayes_invert, disintegrate
from channel_inference.errors import (
    DimensionError,
    FitError,
    ImpossibleObservationError,
    ValidationError,
)
from channel_inference.likelihood import (
    DensityFamily,
    DensityFeature,
    DiscreteFeature,
    FeatureEvaluator,
    GaussianSpec,
    Observation,
    likelihood_invert,
)
from channel_inference.masks import Mask
from channel_inference.spaces import Space

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NaiveBayesModel:
    class_name: str
    prior: State
    features: tuple[str, ...]
    channels: Mapping[str, Channel] = field(default_factory=dict)
    gaussians: Mapping[str, Mapping[str, tuple[float, float]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.prior.space.wires != 1:
            raise FitError("The class prior must live on a single space")
        for name in self.features:
            if (name in self.channels) == (name in self.gaussians):
                raise FitError(f"Feature '{name}' needs exactly one of a channel or Gaussian parameters")

    @property
    def classes(self) -> Space:
        return self.prior.space.factors[0]

    @property
    def hybrid(self) -> bool:
        return bool(self.gaussians)

    def evaluators(self, steps: int = QUADRATURE_STEPS) -> list[FeatureEvaluator]:
        evaluators: list[FeatureEvaluator] = []
        for name in self.features:
            if name in self.channels:
                evaluators.append(DiscreteFeature(self.channels[name], name))
            else:
                family = DensityFamily.gaussian(self.classes, self.gaussians[name], name, steps)
                evaluators.append(DensityFeature(family))
        return evaluators


def _match_feature(name: str, features: Sequence[str]) -> str:
    for feature in features:
        if feature.lower() == name.lower():
            return feature
    raise FitError(f"Gaussian parameters given for unknown feature '{name}'")


def _injected_params(
    specs: Sequence[GaussianSpec],
    features: Sequence[str],
    classes: Space,
) -> dict[str, dict[str, tuple[float, float]]]:
    params: dict[str, dict[str, tuple[float, float]]] = {}
    for spec in specs:
        feature = _match_feature(spec.feature, features)
        if spec.class_label not in classes.labels:
            raise FitError(
                f"Gaussian parameters for unknown class '{spec.class_label}'. "
                f"Expected one of: {', '.join(classes.labels)}"
            )
        params.setdefault(feature, {})[spec.class_label] = (spec.mean, spec.stddev)
    for feature, by_class in params.items():
        missing = [label for label in classes.labels if label not in by_class]
        if missing:
            raise FitError(f"Gaussian parameters for '{feature}' miss classes: {', '.join(missing)}")
    return params


def _fit_gaussians(table: DataTable, class_name: str, feature: str) -> dict[str, tuple[float, float]]:
    values = table.numeric_values(feature)
    labels = np.array([row[table.position(class_name)] for row in table.rows])
    params: dict[str, tuple[float, float]] = {}
    for label in table.column(class_name).space.labels:
        sample = values[labels == label]
        if sample.size < 2:
            raise FitError(f"Class '{label}' has {sample.size} values for '{feature}'; need 2 for a stddev")
        stddev = float(np.std(sample, ddof=1))
        if stddev <= 0:
            raise FitError(f"Feature '{feature}' is constant within class '{label}'")
        params[label] = (float(np.mean(sample)), stddev)
    return params


def naive_bayes_fit(
    table: DataTable,
    class_column: str | None = None,
    hybrid: bool = False,
    gaussians: Sequence[GaussianSpec] | None = None,
) -> NaiveBayesModel:
    class_name = class_column or table.names[-1]
    class_col = table.column(class_name)
    if class_col.numeric:
        raise FitError(f"Class column '{class_name}' is numeric; it must be symbolic")
    features = tuple(name for name in table.names if name != class_name)
    if not features:
        raise FitError("The table needs at least one feature column besides the class column")

    prior = table.joint_state([class_name])
    empty = [label for label, weight in zip(class_col.space.labels, prior.flat) if weight <= 0]
    if empty:
        raise FitError(f"Classes without rows: {', '.join(empty)}")

    injected = _injected_params(gaussians or [], features, class_col.space) if hybrid else {}
    if gaussians and not hybrid:
        raise FitError("Gaussian parameters need hybrid mode")

    channels: dict[str, Channel] = {}
    fitted: dict[str, dict[str, tuple[float, float]]] = {}
    for name in features:
        if name in injected:
            fitted[name] = injected[name]
        elif hybrid and table.column(name).numeric:
            fitted[name] = _fit_gaussians(table, class_name, name)
        else:
            pair = table.joint_state([class_name, name])
            channels[name] = disintegrate(pair, Mask.of(1, 0)).channel

    logger.info(
        "fitted %s on %d rows: %d channels, %d Gaussian features",
        class_name,
        len(table.rows),
        len(channels),
        len(fitted),
    )
    return NaiveBayesModel(class_name, prior, features, channels, fitted)


def tupled_channel(model: NaiveBayesModel) -> Channel:
    """⟨d₁, ..., dₙ⟩ : classes → F₁ ⊗ ... ⊗ Fₙ."""
    if model.hybrid:
        raise ValidationError("A hybrid model has no finite tupled channel")
    return tuple_channels(*(model.channels[name] for name in model.features))


def inversion_channel(model: NaiveBayesModel) -> Channel:
    """The whole inversion F₁ ⊗ ... ⊗ Fₙ → classes along the prior."""
    return bayes_invert(model.prior, tupled_channel(model))


def naive_bayes_classify(
    model: NaiveBayesModel,
    observation: Sequence[Observation],
    eps: float = DEFAULT_EPS,
    steps: int = QUADRATURE_STEPS,
) -> State:
    if len(observation) != len(model.features):
        raise DimensionError(
            f"Observation has {len(observation)} values; features are {', '.join(model.features)}"
        )
    if model.hybrid:
        return likelihood_invert(model.prior, model.evaluators(steps), observation, eps)

    # equals the tupled channel's column at the observation
    weights = model.prior.flat.copy()
    for name, value in zip(model.features, observation):
        c = model.channels[name]
        weights *= c.matrix[:, c.cod.index_of((str(value),))]
    total = float(weights.sum())
    if total <= eps:
        raise ImpossibleObservationError(
            f"Observation ({', '.join(str(v) for v in observation)}) never occurs under any class"
        )
    return State(model.prior.space, weights / total)


class _GaussianParams(BaseModel):
    mean: float
    stddev: float = Field(gt=0)


class _FeatureDump(BaseModel):
    name: str
    kind: str = Field(pattern="^(discrete|gaussian)$")
    labels: list[str] = Field(default_factory=list)
    rows: list[list[float]] = Field(default_factory=list)
    params: dict[str, _GaussianParams] = Field(default_factory=dict)


class _ModelDump(BaseModel):
    class_name: str
    classes: list[str]
    prior: list[float]
    features: list[_FeatureDump]


def dump_model(model: NaiveBayesModel) -> str:
    features: list[_FeatureDump] = []
    for name in model.features:
        if name in model.channels:
            c = model.channels[name]
            features.append(
                _FeatureDump(
                    name=name,
                    kind="discrete",
                    labels=list(c.cod.factors[0].labels),
                    rows=c.matrix.tolist(),
                )
            )
        else:
            params = {
                label: _GaussianParams(mean=mean, stddev=stddev)
                for label, (mean, stddev) in model.gaussians[name].items()
            }
            features.append(_FeatureDump(name=name, kind="gaussian", params=params))
    dump = _ModelDump(
        class_name=model.class_name,
        classes=list(model.classes.labels),
        prior=model.prior.flat.tolist(),
        features=features,
    )
    return dump.model_dump_json(indent=2)


def load_model(text: str) -> NaiveBayesModel:
    try:
        dump = _ModelDump.model_validate_json(text)
    except PydanticValidationError as exc:
        raise ValidationError(f"Invalid model file: {exc.errors()[0]['msg']}") from None

    classes = Space(dump.class_name, tuple(dump.classes))
    prior = State(classes, dump.prior)
    channels: dict[str, Channel] = {}
    gaussians: dict[str, dict[str, tuple[float, float]]] = {}
    for feature in dump.features:
        if feature.kind == "discrete":
            channels[feature.name] = Channel(classes, Space(feature.name, tuple(feature.labels)), feature.rows)
        else:
            gaussians[feature.name] = {label: (p.mean, p.stddev) for label, p in feature.params.items()}
    return NaiveBayesModel(
        dump.class_name,
        prior,
        tuple(feature.name for feature in dump.features),
        channels,
        gaussians,
    )
