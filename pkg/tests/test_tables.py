import csv
import json
import math

import pytest

from utils.tables import TOOL_VERSION, SweepTable, csv_line


def make_table():
    table = SweepTable("sweep", ("t", "r", "error"), {"seed": 0, "a0": "1"})
    table.add_row({"t": 0.1, "r": 0.01})
    table.add_row({"t": 0.01, "r": 0.001})
    return table


def test_csv_layout():
    lines = make_table().to_csv().splitlines()
    assert lines[:3] == ["# a0: 1", "# seed: 0", f"# tool_version: {TOOL_VERSION}"]
    assert lines[3] == "t,r,error"
    assert lines[4] == "0.10000000000000001,0.01,"
    assert len(lines) == 6


def test_key_must_stay_monotone():
    table = make_table()
    with pytest.raises(ValueError):
        table.add_row({"t": 0.05, "r": 0.0})
    with pytest.raises(ValueError):
        table.add_row({"t": 0.01, "r": 0.0})


def test_missing_cells():
    table = SweepTable("x", ("t", "r"))
    with pytest.raises(ValueError):
        table.add_row({"t": 1.0})


def test_failures_keep_their_row():
    table = make_table()
    table.add_failure(0.001, "no bracket, gave up")
    assert table.failure_count == 1
    assert math.isnan(table.column("r")[-1])
    assert table.to_csv().splitlines()[-1] == '0.001,nan,"no bracket, gave up"'
    body = [line for line in table.to_csv().splitlines() if not line.startswith("#")]
    assert list(csv.reader(body))[-1] == ["0.001", "nan", "no bracket, gave up"]


def test_json_layout():
    payload = json.loads(make_table().to_json())
    assert payload["columns"] == ["t", "r", "error"]
    assert payload["metadata"]["tool_version"] == TOOL_VERSION
    assert payload["rows"][1] == {"t": "0.01", "r": "0.001", "error": ""}


def test_identical_tables_serialize_identically():
    assert make_table().to_csv() == make_table().to_csv()
    assert make_table().to_json() == make_table().to_json()


def test_write(tmp_path):
    path = make_table().write(tmp_path / "out", "json")
    assert path.name == "sweep.json"
    assert path.read_text().startswith("{")


def test_csv_line_quotes_separators():
    assert csv_line([1, "a,b", "plain"]) == '1,"a,b",plain'
