"""CSV ingestion, validation errors and report round-trips."""

import numpy as np
import pytest

from mband import (
    Curve,
    DataError,
    FunctionalSample,
    TimeGrid,
    load_sample,
    write_report,
    write_sample,
)
from mband.dataio import read_report_csv
from mband.depth import DepthEntry, DepthReport


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_wide(tmp_path):
    path = write(
        tmp_path,
        "wide.csv",
        "id,1,2,3,4\na,0,1,2,3\nb,1,1,1,1\nc,-1,0,0.5,2\n",
    )
    sample = load_sample(path, "wide")
    assert (sample.n, sample.k, sample.d) == (3, 4, 1)
    assert sample.ids == ("a", "b", "c")
    assert sample.grid.coords == (1.0, 2.0, 3.0, 4.0)
    assert sample.curves[2].values[:, 0].tolist() == [-1.0, 0.0, 0.5, 2.0]


def test_load_long_multivariate(tmp_path):
    path = write(
        tmp_path,
        "long.csv",
        "id,t,x1,x2\n"
        "a,1,0,10\na,2,1,11\na,3,2,12\n"
        "b,1,5,15\nb,2,6,16\nb,3,7,17\n",
    )
    sample = load_sample(path, "long")
    assert (sample.n, sample.k, sample.d) == (2, 3, 2)
    assert sample.curves[1].values.tolist() == [[5.0, 15.0], [6.0, 16.0], [7.0, 17.0]]


def test_blank_cell_names_row_and_column(tmp_path):
    path = write(tmp_path, "w.csv", "id,1,2\na,0,\nb,1,2\n")
    with pytest.raises(DataError, match=r"curve 'a'.*time '2'.*row 2.*column 3"):
        load_sample(path, "wide")


def test_ragged_row_error(tmp_path):
    path = write(tmp_path, "w.csv", "id,1,2\na,0\n")
    with pytest.raises(DataError, match="row 2"):
        load_sample(path, "wide")


def test_duplicate_and_nonnumeric_errors(tmp_path):
    dup = write(tmp_path, "d.csv", "id,t,x1\na,1,0\na,1,2\n")
    with pytest.raises(DataError, match="duplicate"):
        load_sample(dup, "long")
    bad = write(tmp_path, "b.csv", "id,1,2\na,zero,1\n")
    with pytest.raises(DataError, match="non-numeric"):
        load_sample(bad, "wide")
    missing = write(tmp_path, "m.csv", "id,t,x1\na,1,0\na,2,1\nb,1,5\n")
    with pytest.raises(DataError, match="missing time point"):
        load_sample(missing, "long")


def test_nonincreasing_labels_error(tmp_path):
    path = write(tmp_path, "w.csv", "id,2,1\na,0,1\n")
    with pytest.raises(DataError, match="increasing"):
        load_sample(path, "wide")


def test_sample_round_trip_wide_and_long(tmp_path):
    rng = np.random.default_rng(7)
    grid = TimeGrid.regular(5, start=0.25, step=0.5)
    sample = FunctionalSample(
        grid, tuple(Curve(f"c{i}", rng.normal(0, 3, 5)) for i in range(4))
    )
    wide = str(tmp_path / "w.csv")
    write_sample(sample, wide, "wide")
    back = load_sample(wide, "wide")
    assert back.ids == sample.ids
    assert np.abs(back.values - sample.values).max() < 1e-11

    multi = FunctionalSample(
        grid, tuple(Curve(f"c{i}", rng.normal(0, 3, (5, 2))) for i in range(3))
    )
    longp = str(tmp_path / "l.csv")
    write_sample(multi, longp, "long")
    back = load_sample(longp, "long")
    assert np.abs(back.values - multi.values).max() < 1e-11


def test_row_order_only_affects_curve_order(tmp_path):
    text = "id,1,2\nfirst,0,1\nsecond,2,3\n"
    shuffled = "id,1,2\nsecond,2,3\nfirst,0,1\n"
    a = load_sample(write(tmp_path, "a.csv", text), "wide")
    b = load_sample(write(tmp_path, "b.csv", shuffled), "wide")
    by_id_a = {c.id: c.values.tolist() for c in a.curves}
    by_id_b = {c.id: c.values.tolist() for c in b.curves}
    assert by_id_a == by_id_b
    assert a.ids != b.ids


def _report():
    entries = (
        DepthEntry("a", 2.0 / 3.0, 2),
        DepthEntry("b", 1.0, 1),
        DepthEntry("c", 0.25, 3),
    )
    return DepthReport(config={"m": 1, "j": 2}, entries=entries, subset_count=3)


def test_report_csv_round_trip(tmp_path):
    path = str(tmp_path / "r.csv")
    report = _report()
    write_report(report, path, "csv")
    rows = read_report_csv(path)
    assert [(r[0], f"{r[1]:.12g}") for r in rows] == [
        (e.id, f"{e.depth:.12g}") for e in report.entries
    ]
    assert sorted(r[2] for r in rows) == [1, 2, 3]


def test_report_jsonl_has_leading_config(tmp_path):
    import json

    path = str(tmp_path / "r.jsonl")
    write_report(_report(), path, "jsonl")
    lines = [json.loads(line) for line in open(path, encoding="utf-8")]
    assert lines[0]["config"] == {"m": 1, "j": 2}
    assert lines[0]["subset_count"] == 3
    assert [obj["id"] for obj in lines[1:]] == ["a", "b", "c"]


def test_empty_report_is_header_only(tmp_path):
    path = str(tmp_path / "e.csv")
    write_report(DepthReport(config={}, entries=(), subset_count=0), path, "csv")
    with open(path, encoding="utf-8") as fh:
        assert fh.read() == "id,depth,rank\n"
