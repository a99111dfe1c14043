"""Bundled desk-scale fixtures and the JSON document builders they share
with the command line layer.

Fixture ids are stable, opaque strings; every document is schema-valid and
every two-layer fixture resolves without ambiguity.
"""

import json
import math
import os

import numpy as np

from .model import (
    AbstractKData,
    FiniteGraph,
    TwoGraphSpec,
    UnitaryChi,
    rotation_unitary_chi,
    single_vertex_two_graph,
)


def graph_document(g: FiniteGraph) -> dict:
    return {
        "kind": "graph",
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "src": e.src, "rng": e.rng} for e in g.edges],
    }


def two_graph_document(spec: TwoGraphSpec) -> dict:
    return {
        "kind": "two_graph",
        "vertices": list(spec.vertices),
        "edges1": [{"id": e.id, "src": e.src, "rng": e.rng} for e in spec.edges1],
        "edges2": [{"id": e.id, "src": e.src, "rng": e.rng} for e in spec.edges2],
        "chi": [[list(pair), list(image)] for pair, image in spec.chi],
    }


def permutation_document(vertices, perm1: dict, perm2: dict) -> dict:
    return {
        "kind": "permutation",
        "vertices": list(vertices),
        "perm1": dict(perm1),
        "perm2": dict(perm2),
    }


def abstract_document(data: AbstractKData) -> dict:
    def group(g):
        return {"rank": g.free_rank, "torsion": list(g.torsion)}

    def action(f):
        return f.matrix.to_lists()

    return {
        "kind": "abstract_kdata",
        "K0": group(data.k0),
        "K1": group(data.k1),
        "action1": {"K0": action(data.action1_k0), "K1": action(data.action1_k1)},
        "action2": {"K0": action(data.action2_k0), "K1": action(data.action2_k1)},
    }


def unitary_document(u: UnitaryChi) -> dict:
    return {
        "kind": "unitary_chi",
        "m": u.m,
        "n": u.n,
        "matrix": [
            [[float(z.real), float(z.imag)] for z in row] for row in u.matrix
        ],
    }


def cover_document(vertices, cover_map: dict) -> dict:
    return {
        "kind": "cover",
        "vertices": list(vertices),
        "map": dict(cover_map),
    }


def _circle() -> FiniteGraph:
    return FiniteGraph(("v",), (("loop", "v", "v"),))


def _rose(n: int) -> FiniteGraph:
    return FiniteGraph(("v",), tuple((f"e{i}", "v", "v") for i in range(n)))


def _swap_graph() -> FiniteGraph:
    return FiniteGraph(("0", "1"), (("s0", "0", "1"), ("s1", "1", "0")))


def _two_cycle() -> FiniteGraph:
    return FiniteGraph(("a", "b"), (("ab", "a", "b"), ("ba", "b", "a")))


def _abstract_times(p1: int, p2: int) -> AbstractKData:
    from .abelian import FgAbGroup, GroupHom, IntMatrix

    z = FgAbGroup.free(1)

    def times(k):
        return GroupHom(z, z, IntMatrix([[k]]))

    return AbstractKData(z, z, times(p1), times(1), times(p2), times(1))


_REGISTRY = (
    (
        "ex1.2.1-circle",
        "one vertex with a single loop; the classical Toeplitz quotient",
        lambda: graph_document(_circle()),
    ),
    (
        "ex1.2.2-cuntz-2",
        "one vertex with two loops",
        lambda: graph_document(_rose(2)),
    ),
    (
        "ex1.2.3-swap-crossed-product",
        "two vertices exchanged by a single permutation bimodule",
        lambda: graph_document(_swap_graph()),
    ),
    (
        "ex2.2-two-cycle",
        "directed 2-cycle, base graph for the bundled double cover",
        lambda: graph_document(_two_cycle()),
    ),
    (
        "ex2.2-double-cover",
        "2-fold cover map onto the 2-cycle",
        lambda: cover_document(
            ("a0", "a1", "b0", "b1"),
            {"a0": "a", "a1": "a", "b0": "b", "b1": "b"},
        ),
    ),
    (
        "ex3.4-commuting-swaps",
        "two commuting swap permutations on two vertices",
        lambda: permutation_document(
            ("0", "1"), {"0": "1", "1": "0"}, {"0": "1", "1": "0"}
        ),
    ),
    (
        "ex3.4-z2xz3",
        "commuting 2-cycle and 3-cycle on six vertices",
        lambda: permutation_document(
            tuple(f"{i}{j}" for i in range(2) for j in range(3)),
            {f"{i}{j}": f"{(i + 1) % 2}{j}" for i in range(2) for j in range(3)},
            {f"{i}{j}": f"{i}{(j + 1) % 3}" for i in range(2) for j in range(3)},
        ),
    ),
    (
        "ex3.5-flip-2-2",
        "single vertex, two loops per layer, flip pairing",
        lambda: two_graph_document(single_vertex_two_graph(2, 2)),
    ),
    (
        "ex3.5-unitary-chi",
        "rotation-block unitary pairing with angles (pi/4, 0) on (2,2)",
        lambda: unitary_document(rotation_unitary_chi(math.pi / 4, 0.0)),
    ),
    (
        "ex4.5-torus",
        "one loop per layer; commuting pair of circle bimodules",
        lambda: two_graph_document(single_vertex_two_graph(1, 1)),
    ),
    (
        "ex4.6-flip-3-3",
        "single vertex, three loops per layer, flip pairing",
        lambda: two_graph_document(single_vertex_two_graph(3, 3)),
    ),
    (
        "ex4.7-abstract-p2",
        "abstract coefficient K-data: degree-2 and degree-3 cover classes "
        "acting on (Z, Z)",
        lambda: abstract_document(_abstract_times(2, 3)),
    ),
)


def fixture_ids():
    return [fid for fid, _, _ in _REGISTRY]


def fixture_description(fid: str) -> str:
    for name, desc, _ in _REGISTRY:
        if name == fid:
            return desc
    raise KeyError(f"unknown fixture id {fid!r}")


def fixture_document(fid: str) -> dict:
    for name, _, make in _REGISTRY:
        if name == fid:
            return make()
    raise KeyError(f"unknown fixture id {fid!r}")


def write_fixtures(directory: str):
    """Materialize every fixture as <id>.json; returns the written paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for fid in fixture_ids():
        path = os.path.join(directory, f"{fid}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(fixture_document(fid), fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(path)
    return paths
