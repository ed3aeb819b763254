from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator
from pydantic import ValidationError as PydanticValidationError

from channel_inference.algebra import Channel, State, is_causal
from channel_inference.config import Settings
from channel_inference.data_table import DataTable, ingest_csv
from channel_inference.disintegration import FillPolicy, bayes_invert, extract, marginal
from channel_inference.effects import (
    CrossoverPath,
    condition,
    crossover,
    extend,
    parse_effect,
    predicate_transform,
)
from channel_inference.errors import DimensionError, TableFormatError, UnknownLabelError, ValidationError
from channel_inference.independence import Formulation, WireGroups, ci_formulation, cond_indep
from channel_inference.likelihood import parse_feature_specs
from channel_inference.masks import Mask, parse_mask
from channel_inference.naive_bayes import NaiveBayesModel, load_model, naive_bayes_classify, naive_bayes_fit
from channel_inference.rendering import Renderable, render
from channel_inference.spaces import ProductSpace, Space

logger = logging.getLogger(__name__)

Subcommand = Literal["marginal", "extract", "invert", "condition", "crossover", "ci", "fit", "classify"]

CAUSAL_FILE_TOL = 1e-6


class QuerySpec(BaseModel):
    subcommand: Subcommand
    input: str | None = None
    mask: str | None = None
    out_mask: str | None = None
    in_mask: str | None = None
    effect: str | None = None
    channel: str | None = None
    class_column: str | None = None
    hybrid: bool = False
    gaussians: str | None = None
    model: str | None = None
    observation: list[str] = Field(default_factory=list)
    x: str | None = None
    y: str | None = None
    z: str = ""
    split: int = Field(default=1, ge=1)
    path: Literal["backward", "joint", "forward", "all"] = "all"
    formulation: Literal["cond-factor", "factorize3", "drop-y", "factor-pair"] | None = None
    fill: Literal["uniform", "error"] = "uniform"
    eps: float | None = Field(default=None, gt=0)
    output_format: Literal["ket", "json"] | None = None
    precision: int | None = Field(default=None, ge=0)

    @field_validator("observation", mode="before")
    @classmethod
    def _split_observation(cls, value: object) -> object:
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value


@dataclass(frozen=True, eq=False)
class LoadedInput:
    state: State
    channels: dict[str, Channel] = field(default_factory=dict)
    table: DataTable | None = None


class _StateFileChannel(BaseModel):
    dom: list[str] = Field(min_length=1)
    cod: list[str] = Field(min_length=1)
    rows: dict[str, dict[str, float]]


class _StateFile(BaseModel):
    spaces: dict[str, list[str]] = Field(min_length=1)
    wires: list[str] = Field(min_length=1)
    weights: dict[str, float]
    channels: dict[str, _StateFileChannel] = Field(default_factory=dict)


def _product(spaces: dict[str, Space], names: list[str]) -> ProductSpace:
    missing = [name for name in names if name not in spaces]
    if missing:
        raise UnknownLabelError(f"Undeclared spaces: {', '.join(missing)}")
    return ProductSpace.of(*(spaces[name] for name in names))


def _point(key: str, space: ProductSpace) -> tuple[str, ...]:
    parts = tuple(part.strip() for part in key.split("/"))
    if len(parts) != space.wires:
        raise DimensionError(f"Key '{key}' has {len(parts)} labels for {space.describe()}")
    return parts


def load_state_file(path: str | Path) -> LoadedInput:
    """Reads a JSON parameter file: declared spaces, a joint state, optional named channels."""
    path = Path(path)
    try:
        parsed = _StateFile.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise TableFormatError(f"No such file: {path}") from None
    except UnicodeDecodeError:
        raise TableFormatError(f"{path.name} is not UTF-8 text") from None
    except OSError as exc:
        raise TableFormatError(f"Cannot read {path}: {exc.strerror or exc}") from None
    except PydanticValidationError as exc:
        error = exc.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        raise TableFormatError(f"{path.name}: {where}: {error['msg']}") from None

    spaces = {name: Space(name, tuple(labels)) for name, labels in parsed.spaces.items()}
    joint = _product(spaces, parsed.wires)
    weights = np.zeros(joint.size)
    for key, value in parsed.weights.items():
        weights[joint.index_of(_point(key, joint))] = value
    state = State(joint, weights)
    if not is_causal(state, CAUSAL_FILE_TOL):
        raise ValidationError(f"{path.name}: state weights sum to {state.mass:g}, not 1")

    channels: dict[str, Channel] = {}
    for name, spec in parsed.channels.items():
        dom, cod = _product(spaces, spec.dom), _product(spaces, spec.cod)
        matrix = np.zeros((dom.size, cod.size))
        for key, row in spec.rows.items():
            for label, value in row.items():
                matrix[dom.index_of(_point(key, dom)), cod.index_of(_point(label, cod))] = value
        channel = Channel(dom, cod, matrix)
        if not is_causal(channel, CAUSAL_FILE_TOL):
            raise ValidationError(f"{path.name}: rows of channel '{name}' do not sum to 1")
        channels[name] = channel
    return LoadedInput(state, channels)


def load_input(path: str | None) -> LoadedInput:
    if not path:
        raise ValidationError("An input file (.csv table or .json state file) is required")
    if Path(path).suffix.lower() == ".json":
        return load_state_file(path)
    table = ingest_csv(path)
    return LoadedInput(table.joint_state(), table=table)


def _mask(raw: str | None, wires: int, flag: str) -> Mask:
    if raw is None:
        raise ValidationError(f"--{flag} is required")
    return parse_mask(raw, wires)


def _named_channel(loaded: LoadedInput, name: str) -> Channel:
    if name not in loaded.channels:
        known = ", ".join(loaded.channels) or "none"
        raise UnknownLabelError(f"Unknown channel '{name}'. Available: {known}")
    return loaded.channels[name]


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise ValidationError(f"{path} is not UTF-8 text") from None
    except OSError:
        raise ValidationError(f"Cannot read {path}") from None


def _fit_or_load(spec: QuerySpec) -> NaiveBayesModel:
    if spec.model:
        return load_model(_read_text(spec.model))
    loaded = load_input(spec.input)
    if loaded.table is None:
        raise ValidationError("Naive Bayes needs a .csv table")
    gaussians = parse_feature_specs(_read_text(spec.gaussians)) if spec.gaussians else None
    return naive_bayes_fit(loaded.table, spec.class_column, hybrid=spec.hybrid or bool(gaussians), gaussians=gaussians)


def evaluate(spec: QuerySpec, settings: Settings) -> Renderable:
    """Runs one query and returns the unrendered result."""
    settings = query_settings(spec, settings)
    eps = settings.eps
    fill = FillPolicy(spec.fill)
    logger.info("query %s on %s", spec.subcommand, spec.input or spec.model)

    if spec.subcommand == "fit":
        return _fit_or_load(spec)
    if spec.subcommand == "classify":
        return naive_bayes_classify(_fit_or_load(spec), spec.observation, eps, settings.quadrature_steps)

    loaded = load_input(spec.input)
    omega = loaded.state
    wires = omega.space.wires

    if spec.subcommand == "marginal":
        return marginal(omega, _mask(spec.mask, wires, "mask"))

    if spec.subcommand == "extract":
        out_mask = _mask(spec.out_mask, wires, "out-mask")
        in_mask = _mask(spec.in_mask, wires, "in-mask")
        return extract(omega, out_mask, in_mask, fill)

    if spec.subcommand == "invert":
        if spec.channel:
            c = _named_channel(loaded, spec.channel)
            sigma = marginal(omega, parse_mask(spec.mask, wires)) if spec.mask else omega
            return bayes_invert(sigma, c, fill)
        inputs = _mask(spec.mask, wires, "mask")
        c = extract(omega, ~inputs, inputs, fill)
        return bayes_invert(marginal(omega, inputs), c, fill)

    if spec.subcommand == "condition":
        mask = parse_mask(spec.mask, wires) if spec.mask else Mask.full(wires)
        q = parse_effect(spec.effect or "", omega.space.select(mask.bits))
        return condition(omega, extend(q, omega.space, mask), eps)

    if spec.subcommand == "crossover":
        if spec.split >= wires:
            raise DimensionError(f"Cannot split {omega.space.describe()} after {spec.split} wires")
        y_space = omega.space.select([i >= spec.split for i in range(wires)])
        if spec.channel:
            c = _named_channel(loaded, spec.channel)
            q = predicate_transform(c, parse_effect(spec.effect or "", c.cod))
        else:
            q = parse_effect(spec.effect or "", y_space)
        paths = list(CrossoverPath) if spec.path == "all" else [CrossoverPath(spec.path)]
        results = {path.value: crossover(omega, q, path, spec.split, eps) for path in paths}
        return results if spec.path == "all" else results[spec.path]

    if spec.subcommand == "ci":
        groups = WireGroups(
            _mask(spec.x, wires, "x"),
            _mask(spec.y, wires, "y"),
            parse_mask(spec.z, wires),
        )
        if spec.formulation:
            return ci_formulation(omega, groups, Formulation(spec.formulation), settings.ci_eps)
        return cond_indep(omega, groups, settings.ci_eps)

    raise ValidationError(f"Unknown subcommand: {spec.subcommand}")


def query_settings(spec: QuerySpec, settings: Settings) -> Settings:
    """Settings with the query's own flags applied; --eps also sets the CI tolerance."""
    return settings.with_overrides(
        eps=spec.eps,
        ci_eps=spec.eps,
        output_format=spec.output_format,
        precision=spec.precision,
    )


def run_query(spec: QuerySpec, settings: Settings) -> str:
    value = evaluate(spec, settings)
    settings = query_settings(spec, settings)
    return render(value, settings.output_format, settings.precision)
