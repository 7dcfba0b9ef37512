import json
import math

import numpy as np

from spanledger.cli.output import Table, format_number, render_csv, table_to_json, write_table


def test_number_format():
    assert format_number(3) == "3"
    assert format_number(np.int64(7)) == "7"
    assert format_number(0.0) == "0"
    assert format_number(1 / 3) == "0.333333333"
    assert format_number(12345.678901234) == "12345.6789"
    assert format_number(2.5e-4) == "2.50000000e-04"
    assert format_number(-1.5e10) == "-1.50000000e+10"
    assert format_number(math.nan) == "nan"
    assert format_number(-math.inf) == "-inf"
    assert format_number("x") == "x"


def table():
    return Table("t", "demo", ["a", "b"], [(1, 0.5), (2, math.inf)], {"mode": "coherent"}, {"c_inf": 1.25})


def test_csv_layout():
    assert render_csv(table()) == (
        "# schema: spanledger.demo/1\n# mode: coherent\na,b\n1,0.5\n2,inf\n# footer: c_inf=1.25\n"
    )


def test_json_document():
    doc = table_to_json(table())
    assert doc["schema"] == "spanledger.demo/1"
    assert doc["rows"][1] == {"a": 2, "b": "inf"}
    json.dumps(doc, allow_nan=False)


def test_write_table(tmp_path):
    paths = write_table(table(), tmp_path / "out", ("csv", "json"))
    assert [p.name for p in paths] == ["t.csv", "t.json"]
    assert paths[0].read_bytes() == render_csv(table()).encode()
    assert not [p for p in (tmp_path / "out").iterdir() if p.name.startswith(".")]
