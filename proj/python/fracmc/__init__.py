"""Fractional mean curvature of convex bodies, nonlocal perimeters, and the
fractional mean curvature flow of convex planar curves."""

from ._fmc import (
    Body,
    FmcError,
    ball,
    box,
    disk,
    fixture,
    fixture_names,
    flow,
    halpha,
    halpha_nodes,
    icosahedron,
    load_body,
    parse_body,
    rectangle,
    regular_polygon,
    run_suite,
    suite_names,
)

__all__ = [
    "Body",
    "FmcError",
    "ball",
    "box",
    "disk",
    "fixture",
    "fixture_names",
    "flow",
    "halpha",
    "halpha_nodes",
    "icosahedron",
    "load_body",
    "parse_body",
    "rectangle",
    "regular_polygon",
    "run_suite",
    "suite_names",
]
