"""Blocking edges, stability and deferred acceptance for capacitated
bipartite preference systems, including multigraphs.

A system edge is ``(left, right, color)``.  Parallel copies of one underlying
edge share ``(left, right)`` and differ only in color; a matching may hold at
most one copy of each underlying edge.  Plain graphs use color 0 throughout.
Each vertex ranks its incident edges through a sort key (smaller is better),
so large colorful systems never materialize their preference lists.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any, NamedTuple

from .errors import InstanceError, InvariantViolation
from .instance import Instance


class SysEdge(NamedTuple):
    left: str
    right: str
    color: int = 0

    @property
    def base(self) -> tuple[str, str]:
        return self.left, self.right


SystemMatching = frozenset[SysEdge]


@dataclass(frozen=True, eq=False)
class PreferenceSystem:
    left: tuple[str, ...]
    right: tuple[str, ...]
    capacity: dict[str, int]
    edges: tuple[SysEdge, ...]
    key: Callable[[str, SysEdge], Any]

    @cached_property
    def edge_set(self) -> frozenset[SysEdge]:
        return frozenset(self.edges)

    @cached_property
    def incident(self) -> dict[str, list[SysEdge]]:
        """Incident edges of every vertex, best first."""
        out: dict[str, list[SysEdge]] = {v: [] for v in self.left + self.right}
        for e in self.edges:
            out[e.left].append(e)
            out[e.right].append(e)
        for v, es in out.items():
            es.sort(key=lambda e, v=v: self.key(v, e))
        return out

    def order(self, v: str) -> list[SysEdge]:
        return self.incident[v]


def system_from_instance(inst: Instance) -> PreferenceSystem:
    """View an instance as a preference system (agents on the left)."""
    rank = inst.rank
    return PreferenceSystem(
        inst.agents,
        inst.jobs,
        dict(inst.capacity),
        tuple(SysEdge(a, b) for a, b in inst.edges),
        lambda v, e: rank[v][e.right if v == e.left else e.left],
    )


def as_system_matching(m: Iterable[Hashable]) -> SystemMatching:
    return frozenset(e if isinstance(e, SysEdge) else SysEdge(*e) for e in m)


def check_system_matching(sys: PreferenceSystem, m: Iterable[SysEdge]) -> SystemMatching:
    m = as_system_matching(m)
    load: dict[str, int] = defaultdict(int)
    bases = set()
    for e in m:
        if e not in sys.edge_set:
            raise InstanceError(f"{tuple(e)} is not an edge of the system")
        if e.base in bases:
            raise InstanceError(f"two copies of {e.base} in one matching")
        bases.add(e.base)
        load[e.left] += 1
        load[e.right] += 1
    for v, k in load.items():
        if k > sys.capacity[v]:
            raise InstanceError(f"{v!r} matched {k} times, capacity {sys.capacity[v]}")
    return m


def _incidence(m: Iterable[SysEdge]) -> dict[str, list[SysEdge]]:
    out: dict[str, list[SysEdge]] = defaultdict(list)
    for e in m:
        out[e.left].append(e)
        out[e.right].append(e)
    return out


def _wants(sys: PreferenceSystem, v: str, held: Sequence[SysEdge], e: SysEdge) -> bool:
    if len(held) < sys.capacity[v]:
        return True
    k = sys.key(v, e)
    return any(k < sys.key(v, f) for f in held)


def _blocks(sys: PreferenceSystem, at: dict[str, list[SysEdge]], bases: set,
            e: SysEdge) -> bool:
    if e.base in bases:
        return False
    return _wants(sys, e.left, at.get(e.left, ()), e) and _wants(
        sys, e.right, at.get(e.right, ()), e
    )


def is_blocking(sys: PreferenceSystem, m: Iterable[SysEdge], e: SysEdge) -> bool:
    """True iff ``e`` blocks ``m``.

    Copies of an underlying edge already used by ``m`` never block.
    """
    e = e if isinstance(e, SysEdge) else SysEdge(*e)
    if e not in sys.edge_set:
        raise InstanceError(f"{tuple(e)} is not an edge of the system")
    m = as_system_matching(m)
    return _blocks(sys, _incidence(m), {f.base for f in m}, e)


def blocking_edges(sys: PreferenceSystem, m: Iterable[SysEdge]) -> list[SysEdge]:
    m = as_system_matching(m)
    at, bases = _incidence(m), {f.base for f in m}
    return [e for e in sys.edges if _blocks(sys, at, bases, e)]


def is_stable(sys: PreferenceSystem, m: Iterable[SysEdge]) -> tuple[bool, SysEdge | None]:
    """Return ``(stable, witness)`` with the first blocking edge in system order."""
    m = as_system_matching(m)
    at, bases = _incidence(m), {f.base for f in m}
    for e in sys.edges:
        if _blocks(sys, at, bases, e):
            return False, e
    return True, None


def _greedy(sys: PreferenceSystem, v: str, ranked: Iterable[SysEdge]) -> list[SysEdge]:
    """Best independent subset under "cap(v) in total, one per base edge"."""
    taken: list[SysEdge] = []
    used = set()
    cap = sys.capacity[v]
    for e in ranked:
        if len(taken) == cap:
            break
        if e.base not in used:
            used.add(e.base)
            taken.append(e)
    return taken


def deferred_acceptance(sys: PreferenceSystem) -> SystemMatching:
    """Left-proposing deferred acceptance in simultaneous (fixpoint) form.

    Each round every left vertex proposes its greedy best independent set of
    not-yet-rejected edges, and every right vertex keeps its greedy best
    independent subset of the proposals it receives and rejects the rest for
    good.  The held proposals are returned once a round rejects nothing.
    """
    rejected: set[SysEdge] = set()
    rounds = 0
    while True:
        rounds += 1
        proposals: dict[str, list[SysEdge]] = defaultdict(list)
        for a in sys.left:
            for e in _greedy(sys, a, (e for e in sys.order(a) if e not in rejected)):
                proposals[e.right].append(e)
        new_rejections = False
        held: list[SysEdge] = []
        for b, props in proposals.items():
            props.sort(key=lambda e, b=b: sys.key(b, e))
            kept = _greedy(sys, b, props)
            held.extend(kept)
            if len(kept) < len(props):
                rejected.update(set(props) - set(kept))
                new_rejections = True
        if not new_rejections:
            return frozenset(held)
        if rounds > len(sys.edges) + 1:  # pragma: no cover - each round rejects an edge
            raise InvariantViolation("deferred acceptance failed to converge")
