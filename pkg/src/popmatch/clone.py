"""Cloned one-to-one instances and the alternating-cycle popularity test.

Every vertex ``v`` is split into clones ``v_1 .. v_cap(v)``; a clone ranks
the clones of one neighbour consecutively, in index order, where the
original ranked that neighbour.  A perfect matching ``M`` is checked through
one realization ``M'`` over the clones: ``M`` is a popular perfect matching
iff the subgraph ``G'_M'`` holds no alternating cycle of positive weight.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InstanceError, InvariantViolation
from .instance import Edge, Instance, Matching, check_matching, is_perfect, partners
from .voting import DUMMY, delta, vote


def clone_name(v: str, i: int) -> str:
    return f"{v}_{i}"


@dataclass(frozen=True, eq=False)
class ClonedInstance:
    base: Instance
    instance: Instance
    clones: dict[str, tuple[str, ...]]
    origin: dict[str, tuple[str, int]]

    @property
    def n0(self) -> int:
        return len(self.instance.agents)

    def project_edge(self, e: Edge) -> Edge:
        return self.origin[e[0]][0], self.origin[e[1]][0]

    def project(self, m: Iterable[Edge]) -> Matching:
        """Identify clones; fails if two clone edges share an original edge."""
        out = set()
        for e in m:
            pe = self.project_edge(e)
            if pe in out:
                raise InstanceError(f"projection repeats edge {pe}")
            out.add(pe)
        return frozenset(out)


def clone(inst: Instance) -> ClonedInstance:
    """Build the cloned one-to-one instance ``G'``."""
    clones = {
        v: tuple(clone_name(v, i) for i in range(1, inst.capacity[v] + 1))
        for v in inst.vertices
    }
    origin = {c: (v, i) for v, cs in clones.items() for i, c in enumerate(cs, 1)}
    preference = {
        c: [uc for u in inst.preference[v] for uc in clones[u]]
        for v, cs in clones.items()
        for c in cs
    }
    cost = {
        (ai, bj): inst.cost[a, b]
        for a, b in inst.edges
        for ai in clones[a]
        for bj in clones[b]
    }
    one = Instance(
        [c for a in inst.agents for c in clones[a]],
        [c for b in inst.jobs for c in clones[b]],
        {c: 1 for c in origin},
        preference,
        cost,
    )
    return ClonedInstance(inst, one, clones, origin)


@dataclass(frozen=True)
class Realization:
    """Map from each edge of a many-to-many matching to its clone edge."""

    mapping: dict[Edge, Edge]

    @cached_property
    def edges(self) -> Matching:
        return frozenset(self.mapping.values())

    @property
    def base(self) -> Matching:
        return frozenset(self.mapping)


def realize(inst: Instance, m: Iterable[Edge], cloned: ClonedInstance | None = None,
            *, require_perfect: bool = True) -> Realization:
    """Canonical realization: every vertex hands its clones to its partners
    in preference order (best partner gets clone 1)."""
    m = check_matching(inst, m)
    if require_perfect and not is_perfect(inst, m):
        raise InstanceError("matching is not perfect")
    cloned = cloned or clone(inst)
    slot: dict[tuple[str, str], str] = {}
    for v, ps in partners(m).items():
        for i, u in enumerate(sorted(ps, key=inst.rank[v].__getitem__)):
            slot[v, u] = cloned.clones[v][i]
    return Realization({(a, b): (slot[a, b], slot[b, a]) for a, b in m})


@dataclass(frozen=True, eq=False)
class SubgraphGM:
    """The subgraph ``G'_M'``: the realized copy of every matched edge plus
    all clone copies of every unmatched edge."""

    cloned: ClonedInstance
    realization: Realization
    instance: Instance

    @property
    def matching(self) -> Matching:
        return self.realization.edges

    @property
    def edges(self) -> frozenset[Edge]:
        return self.instance.edge_set

    @cached_property
    def mate(self) -> dict[str, str]:
        out = {}
        for a, b in self.matching:
            out[a], out[b] = b, a
        return out


def build_subgraph(cloned: ClonedInstance, realization: Realization) -> SubgraphGM:
    base = cloned.base
    matched = realization.base
    keep = set(realization.edges)
    for a, b in base.edges:
        if (a, b) not in matched:
            keep.update((ai, bj) for ai in cloned.clones[a] for bj in cloned.clones[b])
    one = cloned.instance
    preference = {}
    for c in one.vertices:
        if one.is_agent(c):
            preference[c] = [u for u in one.preference[c] if (c, u) in keep]
        else:
            preference[c] = [u for u in one.preference[c] if (u, c) in keep]
    sub = Instance(one.agents, one.jobs, one.capacity, preference,
                   {e: one.cost[e] for e in keep})
    return SubgraphGM(cloned, realization, sub)


def wt(sub: SubgraphGM, e: Edge) -> int:
    """Sum of both endpoints' votes for ``e`` against their ``M'`` partners:
    +2 if ``e`` blocks ``M'``, -2 if both prefer their partners, else 0."""
    if e not in sub.edges:
        raise InstanceError(f"{e} is not an edge of the subgraph")
    a, b = e
    mate = sub.mate
    return (vote(sub.instance, a, b, mate.get(a, DUMMY))
            + vote(sub.instance, b, a, mate.get(b, DUMMY)))


@dataclass(frozen=True)
class CycleWitness:
    """Alternating cycle given by its matched clone edges ``P_0 .. P_{k-1}``.

    The unmatched edge leaving ``P_t`` joins the agent of ``P_t`` to the job
    of ``P_{t+1}`` (indices mod k).
    """

    matched: tuple[Edge, ...]
    weight: int
    valid: bool
    splits: int = field(default=0, compare=False)

    @property
    def unmatched(self) -> tuple[Edge, ...]:
        k = len(self.matched)
        return tuple((self.matched[t][0], self.matched[(t + 1) % k][1]) for t in range(k))

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(x for pair in zip(self.matched, self.unmatched) for x in pair)


def _witness(sub: SubgraphGM, matched: tuple[Edge, ...], splits: int = 0) -> CycleWitness:
    k = len(matched)
    unmatched = [(matched[t][0], matched[(t + 1) % k][1]) for t in range(k)]
    weight = sum(wt(sub, e) for e in unmatched)
    proj = [sub.cloned.project_edge(e) for e in unmatched]
    return CycleWitness(matched, weight, len(set(proj)) == len(proj), splits)


def cycle_weight(sub: SubgraphGM, c: CycleWitness) -> int:
    return sum(wt(sub, e) for e in c.edges)


def _negative_cycle(n: int, arcs: list[tuple[int, int, int]]) -> list[int] | None:
    """Bellman-Ford from a virtual zero-weight source; returns the nodes of a
    simple negative cycle in arc order, or None."""
    dist = [0] * n
    pred: list[int | None] = [None] * n
    last = None
    for _ in range(n + 1):
        last = None
        for u, v, w in arcs:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = u
                last = v
        if last is None:
            return None
    x = last
    for _ in range(n):
        x = pred[x]
    cycle = [x]
    y = pred[x]
    while y != x:
        cycle.append(y)
        y = pred[y]
    cycle.reverse()
    return cycle


def find_positive_alternating_cycle(sub: SubgraphGM) -> CycleWitness | None:
    """Search ``G'_M'`` for an alternating cycle of positive total weight.

    Nodes are the edges of ``M'``; an unmatched edge ``(a_i, b_l)`` gives an
    arc from ``a_i``'s matched edge to ``b_l``'s with weight ``wt(a_i, b_l)``.
    """
    if not is_perfect(sub.instance, sub.matching):
        raise InstanceError("M' is not perfect in the subgraph")
    nodes = sorted(sub.matching, key=sub.instance.edge_key)
    of_job = {b: k for k, (_, b) in enumerate(nodes)}
    arcs = []
    for u, (a, b) in enumerate(nodes):
        for bl in sub.instance.preference[a]:
            if bl != b:
                arcs.append((u, of_job[bl], -wt(sub, (a, bl))))
    cyc = _negative_cycle(len(nodes), arcs)
    if cyc is None:
        return None
    found = _witness(sub, tuple(nodes[k] for k in cyc))
    if found.weight <= 0 or len(set(cyc)) != len(cyc):
        raise InvariantViolation(f"extracted cycle is not simple and positive: {found}")
    return found


def make_valid(sub: SubgraphGM, c: CycleWitness) -> CycleWitness:
    """Shrink a positive cycle until no original edge appears twice.

    Two clone copies ``(a_i, b_j)`` and ``(a_k, b_l)`` of one unmatched edge
    are swapped for the chords ``(a_i, b_l)`` and ``(a_k, b_j)``, splitting the
    cycle in two with the total weight preserved; a positive part is kept.
    """
    if cycle_weight(sub, c) <= 0:
        raise InstanceError("cycle does not have positive weight")
    splits = c.splits
    while True:
        nodes = c.matched
        proj = [sub.cloned.project_edge(e) for e in c.unmatched]
        pair = next(
            ((s, t) for s in range(len(proj)) for t in range(s + 1, len(proj))
             if proj[s] == proj[t]),
            None,
        )
        if pair is None:
            return CycleWitness(nodes, c.weight, True, splits)
        s, t = pair
        c1 = _witness(sub, nodes[: s + 1] + nodes[t + 1:], splits + 1)
        c2 = _witness(sub, nodes[s + 1: t + 1], splits + 1)
        for chord in (c1.unmatched[s], c2.unmatched[-1]):
            if chord not in sub.edges:
                raise InvariantViolation(f"chord {chord} missing from the subgraph")
        if c.weight != c1.weight + c2.weight:
            raise InvariantViolation(
                f"chord split changed the weight: {c.weight} != {c1.weight} + {c2.weight}"
            )
        splits += 1
        c = c1 if c1.weight > 0 else c2
        if c.weight <= 0:
            raise InvariantViolation("neither part of a positive cycle is positive")


def apply_cycle(sub: SubgraphGM, c: CycleWitness) -> Matching:
    """Project ``M' xor C`` back to the base instance."""
    one_to_one = (sub.matching - set(c.matched)) | set(c.unmatched)
    return sub.cloned.project(one_to_one)


@dataclass(frozen=True)
class PopularityVerdict:
    popular: bool
    witness: Matching | None = None
    cycle: CycleWitness | None = None
    delta: int | None = None


def is_popular_perfect(inst: Instance, m: Iterable[Edge],
                       cloned: ClonedInstance | None = None) -> PopularityVerdict:
    """Decide whether a perfect matching is popular among perfect matchings.

    Any realization may be used here: a positive cycle in any realization
    refutes popularity, and none in one realization certifies it.  On
    refutation the witness is a perfect matching that beats ``m``.
    """
    m = check_matching(inst, m)
    if not is_perfect(inst, m):
        raise InstanceError("matching is not perfect")
    cloned = cloned or clone(inst)
    sub = build_subgraph(cloned, realize(inst, m, cloned))
    cyc = find_positive_alternating_cycle(sub)
    if cyc is None:
        return PopularityVerdict(True)
    cyc = make_valid(sub, cyc)
    n = apply_cycle(sub, cyc)
    d = delta(inst, m, n).value
    if d >= 0 or not is_perfect(inst, n):
        raise InvariantViolation(f"witness does not beat the matching (delta={d})")
    return PopularityVerdict(False, n, cyc, d)
