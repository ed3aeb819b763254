from __future__ import annotations

import json
from collections.abc import Mapping

from channel_inference.algebra import Channel, Scalar, State
from channel_inference.constants import DEFAULT_PRECISION
from channel_inference.effects import Effect
from channel_inference.errors import ValidationError
from channel_inference.naive_bayes import NaiveBayesModel, dump_model
from channel_inference.spaces import Point

Renderable = State | Channel | Effect | Scalar | bool | NaiveBayesModel | Mapping[str, State]

INDEPENDENT = "independent"
NOT_INDEPENDENT = "not independent"


def format_number(value: float, precision: int = DEFAULT_PRECISION) -> str:
    text = f"{value:.{precision}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in {"", "-0"} else text


def ket_label(point: Point) -> str:
    return ",".join(point)


def slash_label(point: Point) -> str:
    return "/".join(point)


def render_ket(state: State, precision: int = DEFAULT_PRECISION) -> str:
    """Ket sum such as 0.795|n⟩ + 0.205|y⟩; terms that round to zero are left out."""
    terms = [
        f"{format_number(weight, precision)}|{ket_label(point)}⟩"
        for point, weight in state.items()
        if format_number(weight, precision) != "0"
    ]
    return " + ".join(terms) if terms else "0"


def render_channel(c: Channel, precision: int = DEFAULT_PRECISION) -> str:
    return "\n".join(
        f"{ket_label(point) or '*'} ↦ {render_ket(c.row(point), precision)}" for point in c.dom.points()
    )


def render_effect(p: Effect, precision: int = DEFAULT_PRECISION) -> str:
    """Same syntax the effect parser reads: label:value,..."""
    return ",".join(f"{slash_label(point)}:{format_number(value, precision)}" for point, value in p.items())


def state_json(state: State) -> dict[str, list]:
    return {
        "labels": [slash_label(point) for point in state.space.points()],
        "weights": state.flat.tolist(),
    }


def channel_json(c: Channel) -> dict[str, list]:
    return {
        "dom": [slash_label(point) for point in c.dom.points()],
        "cod": [slash_label(point) for point in c.cod.points()],
        "rows": c.matrix.tolist(),
    }


def to_json(value: Renderable) -> object:
    if isinstance(value, bool):
        return {"independent": value}
    if isinstance(value, State):
        return state_json(value)
    if isinstance(value, Channel):
        return channel_json(value)
    if isinstance(value, Effect):
        return {"labels": [slash_label(p) for p in value.space.points()], "values": value.flat.tolist()}
    if isinstance(value, Scalar):
        return {"value": value.value}
    if isinstance(value, NaiveBayesModel):
        return json.loads(dump_model(value))
    if isinstance(value, Mapping):
        return {key: state_json(state) for key, state in value.items()}
    raise ValidationError(f"Cannot render {type(value).__name__}")


def render(value: Renderable, output_format: str = "ket", precision: int = DEFAULT_PRECISION) -> str:
    if output_format == "json":
        return json.dumps(to_json(value), ensure_ascii=False)
    if isinstance(value, bool):
        return INDEPENDENT if value else NOT_INDEPENDENT
    if isinstance(value, State):
        return render_ket(value, precision)
    if isinstance(value, Channel):
        return render_channel(value, precision)
    if isinstance(value, Effect):
        return render_effect(value, precision)
    if isinstance(value, Scalar):
        return format_number(value.value, precision)
    if isinstance(value, NaiveBayesModel):
        return dump_model(value)
    if isinstance(value, Mapping):
        return "\n".join(f"{key}: {render_ket(state, precision)}" for key, state in value.items())
    raise ValidationError(f"Cannot render {type(value).__name__}")
