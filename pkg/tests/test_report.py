import csv
import xml.etree.ElementTree as ET

import numpy as np

from nlwaves import report
from nlwaves.diagnostics import ModeTable


def test_mode_table_csv_layout(tmp_path):
    table = ModeTable(kvals=np.array([0.0, 3.0]),
                      amps=np.array([[1.0, 2.0], [3.0, 4.0]]))
    path = tmp_path / "table.csv"
    report.write_mode_table_csv(table, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["m", "abar(k=0)", "abar(k=3)"]
    assert rows[1][0] == "1" and float(rows[1][2]) == 2.0
    assert len(rows) == 3


def test_svg_curves_is_wellformed_xml(tmp_path):
    path = tmp_path / "plot.svg"
    x = np.linspace(0, 1, 50)
    report.svg_curves(path, x, [np.sin(6 * x), np.cos(6 * x)],
                      labels=["a", "b"], logy=True, title="t", xlabel="x",
                      ylabel="y")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    polylines = [el for el in root.iter() if el.tag.endswith("polyline")]
    assert len(polylines) == 2


def test_svg_quiver_is_wellformed_xml(tmp_path):
    path = tmp_path / "quiver.svg"
    r = np.linspace(1, 2, 8)
    z = np.linspace(0, 1, 8)
    ur = np.outer(np.sin(r), np.cos(z))
    uz = np.outer(np.cos(r), np.sin(z))
    report.svg_quiver(path, r, z, ur, uz, title="field")
    root = ET.parse(path).getroot()
    lines = [el for el in root.iter() if el.tag.endswith("line")]
    assert len(lines) >= 64


def test_field_csv_row_count(tmp_path):
    r = np.linspace(1, 2, 4)
    z = np.linspace(0, 1, 5)
    ur = np.zeros((4, 5))
    uz = np.ones((4, 5))
    path = tmp_path / "field.csv"
    report.write_field_csv(r, z, ur, uz, path, meta={"selector": "total"})
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    assert lines[0] == "r,z,u_r,u_z"
    assert len(lines) == 1 + 20


def test_sigma_curve_csv(tmp_path):
    path = tmp_path / "sigma.csv"
    report.write_sigma_curve_csv([1.0, 2.0], [-0.5, 0.5], path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["k", "sigma"]
    assert len(rows) == 3
