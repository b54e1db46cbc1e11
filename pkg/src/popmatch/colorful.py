"""Colorful multigraphs: ``n0`` colored parallel copies of every edge.

Agents prefer lower colors and jobs prefer higher colors; within one color
every vertex keeps its base order.  A perfect matching of ``G`` is popular
among perfect matchings iff some coloring of it is stable in ``G*``.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from .clone import ClonedInstance, SubgraphGM, build_subgraph, clone, realize
from .errors import InstanceError, InvariantViolation
from .instance import Edge, Instance, Matching, check_matching, is_perfect
from .stability import PreferenceSystem, SysEdge, SystemMatching, is_stable

ColorfulMatching = SystemMatching


@dataclass(frozen=True, eq=False)
class ColorfulInstance:
    base: Instance
    n0: int

    def key(self, v: str, e: SysEdge) -> tuple[int, int]:
        rank = self.base.rank[v]
        if v == e.left:
            return e.color, rank[e.right]
        return -e.color, rank[e.left]

    @cached_property
    def system(self) -> PreferenceSystem:
        edges = tuple(
            SysEdge(a, b, c) for a, b in self.base.edges for c in range(1, self.n0 + 1)
        )
        return PreferenceSystem(self.base.agents, self.base.jobs, dict(self.base.capacity),
                                edges, self.key)

    def edges(self) -> tuple[SysEdge, ...]:
        return self.system.edges


def build_colorful_many(inst: Instance) -> ColorfulInstance:
    """``G*``: the colorful version of ``G`` with ``sum cap(a)`` colors."""
    n0 = inst.agent_capacity
    if n0 > len(inst.agents) * len(inst.jobs):
        raise InvariantViolation(f"n0={n0} exceeds |A|*|B|")
    return ColorfulInstance(inst, n0)


def build_colorful_one(sub: SubgraphGM) -> ColorfulInstance:
    """``G0_M'``: the colorful version of ``G'_M'`` with ``|A'|`` colors."""
    return ColorfulInstance(sub.instance, len(sub.instance.agents))


def project(m: Iterable[SysEdge]) -> Matching:
    """Erase colors."""
    out = set()
    for e in m:
        e = e if isinstance(e, SysEdge) else SysEdge(*e)
        if e.base in out:
            raise InstanceError(f"two copies of {e.base} in a colorful matching")
        out.add(e.base)
    return frozenset(out)


def realize_colorful(inst: Instance, m: Iterable[SysEdge],
                     cloned: ClonedInstance | None = None
                     ) -> tuple[SubgraphGM, ColorfulMatching]:
    """One-to-one realization ``M0`` of a colorful matching of ``G*``.

    Clone indices follow the canonical realization of the projection; every
    clone edge keeps the color of its original.
    """
    m = frozenset(e if isinstance(e, SysEdge) else SysEdge(*e) for e in m)
    color = {e.base: e.color for e in m}
    cloned = cloned or clone(inst)
    r = realize(inst, project(m), cloned, require_perfect=False)
    sub = build_subgraph(cloned, r)
    m0 = frozenset(SysEdge(*r.mapping[e], color[e]) for e in r.mapping)
    return sub, m0


def colorful_matching_to_document(inst: Instance, m: Iterable[SysEdge]) -> dict[str, Any]:
    edges = sorted(m, key=lambda e: (inst.edge_key(e.base), e.color))
    return {"edges": [{"agent": e.left, "job": e.right, "color": e.color} for e in edges]}


def colorful_instance_to_document(ci: ColorfulInstance, kind: str) -> dict[str, Any]:
    """Instance-like document with explicit colored preference lists."""
    sys = ci.system

    def vertex(v: str) -> dict[str, Any]:
        prefs = []
        for e in sys.order(v):
            other = e.right if v == e.left else e.left
            prefs.append({"vertex": other, "color": e.color})
        return {"name": v, "capacity": sys.capacity[v], "preferences": prefs}

    return {
        "kind": kind,
        "colors": ci.n0,
        "agents": [vertex(a) for a in sys.left],
        "jobs": [vertex(b) for b in sys.right],
    }


class _LiftSearch:
    """Backtracking over colorings of a perfect matching in document order.

    For an unmatched edge ``(a, b)`` the colors ``c`` at which ``(a, b)_c``
    would block form the interval ``[low_b, high_a]``: ``high_a`` depends only
    on ``a``'s colored edges and never decreases as more get colored,
    ``low_b`` likewise never increases.  A partial coloring is abandoned as
    soon as the interval is non-empty on the edges colored so far.
    """

    def __init__(self, inst: Instance, m: Matching, n0: int) -> None:
        self.inst = inst
        self.n0 = n0
        self.order = sorted(m, key=inst.edge_key)
        self.colored: dict[str, list[tuple[int, str]]] = {v: [] for v in inst.vertices}
        self.watch: dict[str, list[Edge]] = {v: [] for v in inst.vertices}
        for a, b in inst.edges:
            if (a, b) not in m:
                self.watch[a].append((a, b))
                self.watch[b].append((a, b))

    def _high(self, a: str, b: str) -> int | None:
        held = self.colored[a]
        if not held:
            return None
        rank = self.inst.rank[a]
        top = max(c for c, _ in held)
        worst = max(rank[x] for c, x in held if c == top)
        return top if rank[b] < worst else top - 1

    def _low(self, a: str, b: str) -> int | None:
        held = self.colored[b]
        if not held:
            return None
        rank = self.inst.rank[b]
        bottom = min(c for c, _ in held)
        worst = max(rank[y] for c, y in held if c == bottom)
        return bottom if rank[a] < worst else bottom + 1

    def _blocked(self, e: Edge) -> bool:
        hi, lo = self._high(*e), self._low(*e)
        return hi is not None and lo is not None and lo <= hi

    def run(self) -> list[int] | None:
        colors: list[int] = []

        def extend(k: int) -> bool:
            if k == len(self.order):
                return True
            a, b = self.order[k]
            for c in range(1, self.n0 + 1):
                self.colored[a].append((c, b))
                self.colored[b].append((c, a))
                ok = not any(self._blocked(e) for e in self.watch[a] + self.watch[b])
                if ok:
                    colors.append(c)
                    if extend(k + 1):
                        return True
                    colors.pop()
                self.colored[a].pop()
                self.colored[b].pop()
            return False

        return colors if extend(0) else None


def lift_to_stable(inst: Instance, m: Iterable[Edge],
                   colorful: ColorfulInstance | None = None) -> ColorfulMatching | None:
    """Find the lexicographically first coloring of ``m`` that is stable in
    ``G*``, or None when no coloring is stable."""
    m = check_matching(inst, m)
    if not is_perfect(inst, m):
        raise InstanceError("matching is not perfect")
    ci = colorful or build_colorful_many(inst)
    search = _LiftSearch(inst, m, ci.n0)
    colors = search.run()
    if colors is None:
        return None
    lifted = frozenset(SysEdge(a, b, c) for (a, b), c in zip(search.order, colors))
    stable, witness = is_stable(ci.system, lifted)
    if not stable:
        raise InvariantViolation(f"lifted coloring is blocked by {witness}")
    return lifted
