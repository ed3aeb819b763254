from __future__ import annotations

from pathlib import Path

import pytest

from channel_inference.data_table import ingest_csv
from channel_inference.disintegration import marginal
from channel_inference.errors import TableFormatError, UnknownLabelError, ValidationError
from channel_inference.masks import Mask

DATA = Path(__file__).resolve().parent.parent / "data"


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "table.csv"
    path.write_text(text)
    return path


def test_weather_table_shape() -> None:
    table = ingest_csv(DATA / "weather.csv")
    assert table.names == ("Outlook", "Temperature", "Humidity", "Windy", "Play")
    assert [len(c.space) for c in table.columns] == [3, 3, 2, 2, 2]
    assert table.column("Outlook").space.labels == ("s", "o", "r")
    assert table.column("Play").space.labels == ("n", "y")
    assert len(table.rows) == 14
    assert not any(c.numeric for c in table.columns)


def test_numeric_columns_are_detected() -> None:
    table = ingest_csv(DATA / "weather_numeric.csv")
    assert table.column("Temperature").numeric
    assert table.column("Humidity").numeric
    assert not table.column("Windy").numeric
    assert table.numeric_values("Temperature")[:3].tolist() == [85.0, 80.0, 83.0]
    with pytest.raises(ValidationError):
        table.numeric_values("Windy")


def test_joint_state_marginals_are_column_frequencies() -> None:
    table = ingest_csv(DATA / "weather.csv")
    omega = table.joint_state()
    assert omega.mass == pytest.approx(1.0, abs=1e-15)
    for i, column in enumerate(table.columns):
        counts = [sum(1 for row in table.rows if row[i] == label) for label in column.space.labels]
        single = marginal(omega, Mask.from_indices(len(table.columns), [i]))
        for weight, count in zip(single.flat, counts):
            assert weight == pytest.approx(count / 14, abs=1e-15)


def test_one_row_table_gives_a_point_state(tmp_path: Path) -> None:
    table = ingest_csv(_write(tmp_path, "A,B\nx,y\n"))
    assert table.joint_state().flat.tolist() == [1.0]


def test_duplicate_rows_add_mass(tmp_path: Path) -> None:
    table = ingest_csv(_write(tmp_path, "A,B\nx,y\nx,y\nx,z\n"))
    omega = table.joint_state()
    assert omega[("x", "y")] == pytest.approx(2 / 3)
    assert omega[("x", "z")] == pytest.approx(1 / 3)


def test_joint_state_over_chosen_columns() -> None:
    table = ingest_csv(DATA / "weather.csv")
    pair = table.joint_state(["Play", "Outlook"])
    assert pair.space.names == ("Play", "Outlook")
    assert pair[("y", "o")] == pytest.approx(4 / 14)
    with pytest.raises(UnknownLabelError):
        table.joint_state(["Rain"])


@pytest.mark.parametrize(
    "text",
    [
        "",
        "A,B\n",
        "A,B\nx,y,z\n",
        "A,B\nx\n",
        "A,B\nx,\n",
        "A,B\n1,x\na,y\n",
    ],
)
def test_malformed_tables(tmp_path: Path, text: str) -> None:
    with pytest.raises(TableFormatError):
        ingest_csv(_write(tmp_path, text))


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(TableFormatError):
        ingest_csv(tmp_path / "absent.csv")
