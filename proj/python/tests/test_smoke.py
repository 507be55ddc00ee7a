import json
import math
import os
import pathlib

import pytest

import fracmc

DISK_HALF = 2 ** -0.5 * math.sqrt(math.pi) * math.gamma(0.25) / math.gamma(0.75)
FIXTURES = pathlib.Path(os.environ.get("FMC_FIXTURE_DIR", pathlib.Path(__file__).parents[2] / "fixtures"))


def test_disk_curvature_matches_closed_form():
    value = fracmc.halpha(fracmc.disk(), [1.0, 0.0], 0.5)
    assert value == pytest.approx(DISK_HALF, rel=5e-3)
    scaled = fracmc.halpha(fracmc.disk(2.0), [0.0, 2.0], 0.5)
    assert scaled == pytest.approx(2 ** -0.5 * value, rel=5e-3)


def test_chord_and_boundary_agree_on_square():
    square = fracmc.fixture("square")
    point = [0.3, 0.0]
    chord = fracmc.halpha(square, point, 0.5, method="chord")
    boundary = fracmc.halpha(square, point, 0.5, method="boundary")
    assert boundary == pytest.approx(chord, rel=1e-2)


def test_bodies_and_fixtures():
    assert set(fracmc.fixture_names()) == {"ball2d", "ball3d", "square", "cube", "icosa", "thinrect"}
    cube = fracmc.load_body(str(FIXTURES / "cube.json"))
    assert cube.surface_dim == 2
    assert cube.perimeter == pytest.approx(6.0)
    doc = json.loads(fracmc.fixture("square").to_json())
    assert doc["type"] == "polygon"
    assert fracmc.parse_body(json.dumps(doc)).volume == pytest.approx(1.0)


def test_invalid_input_raises():
    with pytest.raises(fracmc.FmcError, match="Degenerate"):
        fracmc.parse_body('{"type": "polygon", "vertices": [[0, 0], [1, 0]]}')
    with pytest.raises(ValueError):
        fracmc.halpha(fracmc.disk(), [1.0, 0.0], 1.5)
    with pytest.raises(fracmc.FmcError):
        fracmc.run_suite("nonexistent")


def test_node_curvatures_are_positive():
    nodes = fracmc.halpha_nodes(fracmc.fixture("icosa"), 0.25)
    assert len(nodes["values"]) == len(nodes["points"]) == len(nodes["weights"])
    assert min(nodes["values"]) > 0.0


def test_appendix_suite_passes():
    reports = fracmc.run_suite("appendix", seed=3)
    assert reports
    assert all(r["pass"] for r in reports)
    assert {"cauchy_formula", "rosenthal_szasz", "isodiametric_volume"} <= {r["name"] for r in reports}


def test_circle_flow_extinction_time():
    run = fracmc.flow(fracmc.disk(), alpha=0.5, markers=128)
    assert run["termination"] == "extinct"
    assert run["T_star"] == pytest.approx(1.0 / (1.5 * DISK_HALF), rel=0.02)
    assert all(b < a for a, b in zip(run["perimeter"], run["perimeter"][1:]))
    decay, first_variation = run["reports"]
    assert decay["pass"] and first_variation["pass"]
