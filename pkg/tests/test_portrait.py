import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from geoflow.errors import DimensionalityLimit
from geoflow.portrait import corners, render_portrait, to_plane

NS = "{http://www.w3.org/2000/svg}"


def orbit():
    t = np.linspace(0, 2 * np.pi, 400)
    return np.c_[1 / 3 + 0.1 * np.cos(t), 1 / 3 + 0.1 * np.sin(t), 1 / 3 - 0.1 * np.cos(t) - 0.1 * np.sin(t)]


def test_corners_are_vertices():
    np.testing.assert_allclose(to_plane(np.eye(3)), corners())
    C = corners()
    assert C[0, 1] < C[1, 1] == C[2, 1] and C[1, 0] < C[0, 0] < C[2, 0]
    # equilateral
    d = [np.linalg.norm(C[i] - C[j]) for i, j in ((0, 1), (1, 2), (0, 2))]
    np.testing.assert_allclose(d, d[0])


def test_svg_structure():
    B = [1 / 3] * 3
    doc = render_portrait([orbit(), np.tile(B, (5, 1))], rest_points=[B, [1, 0, 0]], nash=[B], title="a<b")
    root = ET.fromstring(doc)
    assert root.get("version") == "1.1"
    assert root.find(f"{NS}title").text == "a<b"
    assert len(root.findall(f"{NS}polyline")) == 1
    fills = [c.get("fill") for c in root.findall(f"{NS}circle")]
    assert fills.count("black") == 1 and fills.count("white") == 1 and len(fills) == 3


def test_number_format_and_determinism():
    doc = render_portrait([orbit()])
    assert doc == render_portrait([orbit()])
    nums = re.findall(r"-?\d+\.\d+(?:e-?\d+)?", doc)
    assert nums and all(len(re.sub(r"[-.]|e.*", "", s).lstrip("0")) <= 9 for s in nums)


def test_long_trajectories_thinned():
    X = np.repeat(orbit(), 20, axis=0)
    line = ET.fromstring(render_portrait([X])).find(f"{NS}polyline")
    assert len(line.get("points").split()) <= 1501


def test_rejects_other_dimensions():
    with pytest.raises(DimensionalityLimit):
        render_portrait([np.full((3, 4), 0.25)])
