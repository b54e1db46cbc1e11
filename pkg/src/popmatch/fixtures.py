"""Small hand-written instances used by the tests, the acceptance suite and
the README walkthrough."""

from __future__ import annotations

from typing import Any

from .instance import Instance, instance_from_document


def _vertex(name: str, cap: int, prefs: list[str]) -> dict[str, Any]:
    return {"name": name, "capacity": cap, "preferences": prefs}


# One-to-one: the only stable matching {(a,b)} is not perfect, while the
# unique perfect matching {(a,b'),(a',b)} is blocked by (a,b).
F1_DOC: dict[str, Any] = {
    "agents": [_vertex("a", 1, ["b", "b'"]), _vertex("a'", 1, ["b"])],
    "jobs": [_vertex("b", 1, ["a", "a'"]), _vertex("b'", 1, ["a"])],
}

# Capacity-2 instance whose only perfect matching uses all four edges.
F2_DOC: dict[str, Any] = {
    "agents": [_vertex("a", 2, ["b", "b'"]), _vertex("a'", 2, ["b'", "b"])],
    "jobs": [_vertex("b", 2, ["a", "a'"]), _vertex("b'", 2, ["a'", "a"])],
}

# A single voter v ranking u1 > ... > u6.
F3_DOC: dict[str, Any] = {
    "agents": [_vertex("v", 3, [f"u{i}" for i in range(1, 7)])],
    "jobs": [_vertex(f"u{i}", 1, ["v"]) for i in range(1, 7)],
}

# Complete 2x2 with two perfect matchings, only one of them popular.
F4_DOC: dict[str, Any] = {
    "agents": [_vertex("a1", 1, ["b2", "b1"]), _vertex("a2", 1, ["b1", "b2"])],
    "jobs": [_vertex("b1", 1, ["a1", "a2"]), _vertex("b2", 1, ["a1", "a2"])],
}

F4_COSTS_DOC: dict[str, Any] = {
    **F4_DOC,
    "costs": [
        {"agent": "a1", "job": "b1", "cost": 0},
        {"agent": "a1", "job": "b2", "cost": 5},
        {"agent": "a2", "job": "b1", "cost": 5},
        {"agent": "a2", "job": "b2", "cost": 0},
    ],
}


def f1() -> Instance:
    return instance_from_document(F1_DOC)


def f2() -> Instance:
    return instance_from_document(F2_DOC)


def f3() -> Instance:
    return instance_from_document(F3_DOC)


def f4() -> Instance:
    return instance_from_document(F4_DOC)


def f4_costs() -> Instance:
    return instance_from_document(F4_COSTS_DOC)
