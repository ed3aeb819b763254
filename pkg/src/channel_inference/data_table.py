from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from channel_inference.algebra import State, state_from_rows
from channel_inference.errors import TableFormatError, UnknownLabelError, ValidationError
from channel_inference.spaces import Point, ProductSpace, Space

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Column:
    name: str
    space: Space
    numeric: bool = False


@dataclass(frozen=True)
class DataTable:
    """A rectangular grid of labels; each column's labels in first-appearance order."""

    columns: tuple[Column, ...]
    rows: tuple[Point, ...]

    def __post_init__(self) -> None:
        width = len(self.columns)
        for number, row in enumerate(self.rows, start=1):
            if len(row) != width:
                raise TableFormatError(f"Row {number} has {len(row)} cells, expected {width}")
            for column, label in zip(self.columns, row):
                column.space.index(label)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(column.name for column in self.columns)

    @property
    def space(self) -> ProductSpace:
        return ProductSpace.of(*(column.space for column in self.columns))

    def position(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownLabelError(
                f"Unknown column '{name}'. Expected one of: {', '.join(self.names)}"
            ) from None

    def column(self, name: str) -> Column:
        return self.columns[self.position(name)]

    def joint_state(self, names: Sequence[str] | None = None) -> State:
        """Empirical joint state over the chosen columns (all by default), in table order if not given."""
        chosen = list(names) if names is not None else list(self.names)
        positions = [self.position(name) for name in chosen]
        space = ProductSpace.of(*(self.columns[i].space for i in positions))
        return state_from_rows(space, (tuple(row[i] for i in positions) for row in self.rows))

    def numeric_values(self, name: str) -> np.ndarray:
        column = self.column(name)
        if not column.numeric:
            raise ValidationError(f"Column '{name}' is not numeric")
        i = self.position(name)
        return np.array([float(row[i]) for row in self.rows])


def _is_numeric(series: pd.Series, name: str) -> bool:
    parsed = pd.to_numeric(series, errors="coerce")
    hits = int(parsed.notna().sum())
    if hits == len(series):
        return True
    if hits:
        raise TableFormatError(f"Column '{name}' mixes numeric and symbolic values")
    return False


def ingest_csv(path: str | Path) -> DataTable:
    path = Path(path)
    if not path.exists():
        raise TableFormatError(f"No such file: {path}")
    try:
        raw = pd.read_csv(
            path, header=None, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8"
        )
    except pd.errors.EmptyDataError:
        raise TableFormatError(f"{path.name} is empty") from None
    except pd.errors.ParserError as exc:
        raise TableFormatError(f"{path.name} has ragged rows: {exc}") from None
    except UnicodeDecodeError:
        raise TableFormatError(f"{path.name} is not UTF-8 text") from None
    except OSError as exc:
        raise TableFormatError(f"Cannot read {path}: {exc.strerror or exc}") from None

    if len(raw) < 2:
        raise TableFormatError(f"{path.name} has a header but no data rows")
    if raw.isna().any().any():
        raise TableFormatError(f"{path.name} has ragged rows")
    raw = raw.apply(lambda series: series.str.strip())
    names = raw.iloc[0].tolist()
    if len(set(names)) != len(names):
        raise TableFormatError(f"{path.name} has duplicate column headers")
    frame = raw.iloc[1:].reset_index(drop=True)
    frame.columns = names
    if any(not name for name in names):
        raise TableFormatError(f"{path.name} has an empty column header")
    empty = frame.eq("")
    if empty.any().any():
        row, col = np.argwhere(empty.to_numpy())[0]
        raise TableFormatError(f"{path.name} has an empty cell in row {row + 1}, column '{names[col]}'")

    columns = tuple(
        Column(name, Space(name, tuple(pd.unique(frame[name]))), _is_numeric(frame[name], name))
        for name in names
    )
    rows = tuple(tuple(record) for record in frame.itertuples(index=False, name=None))
    logger.info(
        "ingested %s: %d rows, columns %s",
        path.name,
        len(rows),
        ", ".join(f"{c.name}{'#' if c.numeric else ''}({len(c.space)})" for c in columns),
    )
    return DataTable(columns, rows)
