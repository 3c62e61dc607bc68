import json
import math

import numpy as np
import pytest

from shrinkerlab.plotting import (
    ReportError,
    loglog_slope,
    plot_refinement,
    plot_reports,
    plot_series,
    report_kind,
)
from shrinkerlab.reports import (
    canonical,
    csv_text,
    dumps,
    format_number,
    read_csv,
    write_csv,
    write_json,
    write_manifest,
)


def test_twelve_significant_digits():
    assert format_number(1 / 3) == "0.333333333333"
    assert format_number(7) == "7"
    assert format_number(float("nan")) == "nan"
    assert canonical({"a": np.float64(2 / 3), "b": (1, np.int64(2))}) == {"a": 0.666666666667, "b": [1, 2]}
    assert canonical([float("inf"), float("nan")]) == [None, None]
    with pytest.raises(TypeError):
        canonical(object())


def test_dumps_sorted_and_stable():
    a = dumps({"b": 1.0, "a": np.arange(3)})
    b = dumps({"a": [0, 1, 2], "b": 1.0})
    assert a == b
    assert list(json.loads(a)) == ["a", "b"]


def test_csv_roundtrip(tmp_path):
    p = write_csv(tmp_path / "x.csv", ["a", "b"], [[1, 0.1], [2, None]])
    header, cols = read_csv(p)
    assert header == ["a", "b"]
    assert cols["a"] == [1.0, 2.0]
    assert math.isnan(cols["b"][1])
    assert csv_text(["s"], [["text"]]) == "s\ntext\n"


def test_manifest_hashes_outputs(tmp_path):
    out = write_json(tmp_path / "r.json", {"x": 1})
    m = write_manifest(tmp_path, {"command": "verify"}, [out], name="r.manifest.json")
    data = json.loads(m.read_text())
    assert set(data["outputs"]) == {"r.json"}
    assert "timestamp" in data
    assert "timestamp" not in out.read_text()


def test_slope_of_power_law():
    h = np.array([0.4, 0.2, 0.1])
    assert math.isclose(loglog_slope(h, 3 * h**2), 2.0, rel_tol=1e-12)
    with pytest.raises(ReportError):
        loglog_slope([0.1], [1.0])


def test_svg_is_deterministic(tmp_path):
    h = [0.4, 0.2, 0.1]
    plot_refinement(h, [1e-2, 2.5e-3, 6e-4], tmp_path / "a.svg")
    plot_refinement(h, [1e-2, 2.5e-3, 6e-4], tmp_path / "b.svg")
    a, b = (tmp_path / "a.svg").read_bytes(), (tmp_path / "b.svg").read_bytes()
    assert a == b
    assert b"<dc:date>" not in a
    plot_series([0, 1, 2], [3.0, 2.0, 1.0], "residual_linf", tmp_path / "s.svg")
    assert (tmp_path / "s.svg").stat().st_size > 0


def _verify(tmp_path, name, h, v):
    return write_json(tmp_path / f"{name}.json", {"kind": "verify", "mean_edge_length": h,
                                                   "residual_linf": v})


def test_plot_reports_refinement(tmp_path):
    paths = [_verify(tmp_path, f"r{i}", h, h**2) for i, h in enumerate([0.4, 0.2, 0.1])]
    svgs, extra = plot_reports(paths, tmp_path / "out", prefix="conv")
    assert svgs[0].name == "conv_residual_linf.svg"
    assert math.isclose(extra["slope"], 2.0, rel_tol=1e-9)


def test_plot_reports_errors(tmp_path):
    empty = tmp_path / "e.json"
    empty.write_text("")
    with pytest.raises(ReportError, match="empty"):
        report_kind(empty)
    blank = write_json(tmp_path / "b.json", {})
    with pytest.raises(ReportError, match="empty"):
        plot_reports([blank], tmp_path)
    a = _verify(tmp_path, "a", 0.1, 0.01)
    sweep = write_json(tmp_path / "s.json", {"kind": "audit", "sweep": [
        {"R": 1.0, "empirical_C": 0.5, "violated": False}]})
    with pytest.raises(ReportError, match="mixed"):
        plot_reports([a, sweep], tmp_path)
    with pytest.raises(ReportError, match="two"):
        plot_reports([a], tmp_path)
    with pytest.raises(ReportError):
        plot_reports([], tmp_path)
    with pytest.raises(ReportError, match="does not exist"):
        plot_reports([tmp_path / "none.json"], tmp_path)
