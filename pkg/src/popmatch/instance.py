"""Capacitated bipartite preference instances and their matchings.

Vertices are plain strings.  Agents and jobs share one namespace, so an edge
is always written ``(agent, job)`` and a matching is a frozenset of such
pairs.  Costs are held as integers scaled by ``COST_SCALE`` so that all cost
comparisons are exact.
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import cached_property
from typing import Any

import networkx as nx

from .errors import GenerationError, InfeasibleError, InstanceError

COST_SCALE = 10**6

Edge = tuple[str, str]
Matching = frozenset[Edge]


def parse_cost(value: Any) -> int:
    """Convert a decimal cost (number or string) to a scaled integer."""
    if isinstance(value, bool):
        raise InstanceError(f"invalid cost {value!r}")
    try:
        dec = Decimal(str(value))
    except InvalidOperation:
        raise InstanceError(f"invalid cost {value!r}") from None
    if not dec.is_finite():
        raise InstanceError(f"invalid cost {value!r}")
    scaled = dec * COST_SCALE
    if scaled != scaled.to_integral_value():
        raise InstanceError(f"cost {value!r} has more than 6 fractional digits")
    return int(scaled)


def format_cost(scaled: int) -> int | str:
    """Inverse of :func:`parse_cost`; integral costs stay JSON integers."""
    if scaled % COST_SCALE == 0:
        return scaled // COST_SCALE
    text = format(Decimal(scaled) / COST_SCALE, "f")
    return text.rstrip("0").rstrip(".") if "." in text else text


@dataclass(frozen=True)
class Instance:
    """A many-to-many instance ``G = (A u B, E)`` with capacities and costs.

    ``preference[v]`` lists the neighbours of ``v`` from most to least
    preferred.  The edge set is implied by the (mutual) preference lists.
    """

    agents: tuple[str, ...]
    jobs: tuple[str, ...]
    capacity: Mapping[str, int]
    preference: Mapping[str, tuple[str, ...]]
    cost: Mapping[Edge, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(
            self, "preference", {v: tuple(p) for v, p in self.preference.items()}
        )
        object.__setattr__(self, "capacity", dict(self.capacity))
        self._validate()
        costs = {e: 0 for e in self.edges}
        for e, c in dict(self.cost).items():
            if e not in costs:
                raise InstanceError(f"cost given for non-edge {e}")
            costs[e] = int(c)
        object.__setattr__(self, "cost", costs)

    def _validate(self) -> None:
        seen: set[str] = set()
        for v in self.agents + self.jobs:
            if not isinstance(v, str) or not v:
                raise InstanceError(f"vertex ids must be non-empty strings, got {v!r}")
            if v in seen:
                raise InstanceError(f"duplicate vertex name {v!r}")
            seen.add(v)
        agents, jobs = set(self.agents), set(self.jobs)
        for side, other in ((self.agents, jobs), (self.jobs, agents)):
            for v in side:
                prefs = self.preference.get(v, ())
                if len(set(prefs)) != len(prefs):
                    raise InstanceError(f"duplicate preference entries for {v!r}")
                for u in prefs:
                    if u not in other:
                        raise InstanceError(
                            f"{v!r} lists {u!r}, which is not on the opposite side"
                        )
        for a in self.agents:
            for b in self.preference.get(a, ()):
                if a not in self.preference.get(b, ()):
                    raise InstanceError(f"asymmetric listing: {a!r} lists {b!r} but not vice versa")
        for b in self.jobs:
            for a in self.preference.get(b, ()):
                if b not in self.preference.get(a, ()):
                    raise InstanceError(f"asymmetric listing: {b!r} lists {a!r} but not vice versa")
        extra = set(self.preference) - seen
        if extra:
            raise InstanceError(f"preferences given for unknown vertices {sorted(extra)}")
        for v in self.agents + self.jobs:
            cap = self.capacity.get(v)
            if isinstance(cap, bool) or not isinstance(cap, int):
                raise InstanceError(f"capacity of {v!r} must be an integer")
            if not 1 <= cap <= len(self.preference.get(v, ())):
                raise InstanceError(
                    f"capacity of {v!r} is {cap}, must lie in [1, degree={len(self.preference.get(v, ()))}]"
                )

    @cached_property
    def index(self) -> dict[str, int]:
        """Document-order index of every vertex (agents and jobs separately)."""
        idx = {a: i for i, a in enumerate(self.agents)}
        idx.update({b: j for j, b in enumerate(self.jobs)})
        return idx

    @cached_property
    def rank(self) -> dict[str, dict[str, int]]:
        return {v: {u: r for r, u in enumerate(p)} for v, p in self.preference.items()}

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        """All edges in canonical (agent index, job index) order."""
        idx = {b: j for j, b in enumerate(self.jobs)}
        return tuple(
            (a, b)
            for a in self.agents
            for b in sorted(self.preference.get(a, ()), key=idx.__getitem__)
        )

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def _agent_set(self) -> frozenset[str]:
        return frozenset(self.agents)

    def is_agent(self, v: str) -> bool:
        return v in self._agent_set

    def neighbors(self, v: str) -> tuple[str, ...]:
        return self.preference.get(v, ())

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.agents + self.jobs

    @property
    def agent_capacity(self) -> int:
        return sum(self.capacity[a] for a in self.agents)

    @property
    def job_capacity(self) -> int:
        return sum(self.capacity[b] for b in self.jobs)

    def prefers(self, v: str, u: str, w: str) -> bool:
        """True iff ``v`` strictly prefers neighbour ``u`` to ``w``."""
        r = self.rank[v]
        return r[u] < r[w]

    def edge_key(self, e: Edge) -> tuple[int, int]:
        return self.index[e[0]], self.index[e[1]]

    @cached_property
    def memo(self) -> dict[Any, Any]:
        """Scratch cache for pure derived values (e.g. set votes)."""
        return {}

    def with_costs(self, cost: Mapping[Edge, int]) -> Instance:
        return Instance(self.agents, self.jobs, self.capacity, self.preference, cost)


def partners(m: Iterable[Edge]) -> dict[str, set[str]]:
    """Map each matched vertex to its set of partners."""
    out: dict[str, set[str]] = defaultdict(set)
    for a, b in m:
        out[a].add(b)
        out[b].add(a)
    return out


def check_matching(inst: Instance, m: Iterable[Edge]) -> Matching:
    """Validate ``m`` as a matching of ``inst`` and return it as a frozenset."""
    m = frozenset(m)
    for e in m:
        if e not in inst.edge_set:
            raise InstanceError(f"{e} is not an edge of the instance")
    for v, ps in partners(m).items():
        if len(ps) > inst.capacity[v]:
            raise InstanceError(f"{v!r} matched {len(ps)} times, capacity {inst.capacity[v]}")
    return m


def is_perfect(inst: Instance, m: Iterable[Edge]) -> bool:
    """True iff every vertex is matched exactly up to its capacity."""
    m = check_matching(inst, m)
    p = partners(m)
    return all(len(p.get(v, ())) == inst.capacity[v] for v in inst.vertices)


def require_perfect(inst: Instance, m: Iterable[Edge]) -> Matching:
    m = check_matching(inst, m)
    if not is_perfect(inst, m):
        raise InstanceError("matching is not perfect")
    return m


def matching_cost(inst: Instance, m: Iterable[Edge]) -> int:
    return sum(inst.cost[e] for e in m)


def matching_key(inst: Instance, m: Iterable[Edge]) -> tuple[tuple[int, int], ...]:
    """Lexicographic tie-break key over canonical vertex indices."""
    return tuple(sorted(inst.edge_key(e) for e in m))


def sorted_edges(inst: Instance, m: Iterable[Edge]) -> list[Edge]:
    return sorted(m, key=inst.edge_key)


def admits_perfect_matching(inst: Instance) -> bool:
    """Max-flow feasibility check with vertex capacities."""
    total = inst.agent_capacity
    if total != inst.job_capacity:
        return False
    g = nx.DiGraph()
    src, dst = ("source",), ("sink",)
    for a in inst.agents:
        g.add_edge(src, ("a", a), capacity=inst.capacity[a])
    for b in inst.jobs:
        g.add_edge(("b", b), dst, capacity=inst.capacity[b])
    for a, b in inst.edges:
        g.add_edge(("a", a), ("b", b), capacity=1)
    value, _ = nx.maximum_flow(g, src, dst)
    return value == total


def require_feasible(inst: Instance) -> None:
    if inst.agent_capacity != inst.job_capacity:
        raise InfeasibleError(
            f"total agent capacity {inst.agent_capacity} != total job capacity {inst.job_capacity}"
        )
    if not admits_perfect_matching(inst):
        raise InfeasibleError("instance admits no perfect matching")


# --- documents -------------------------------------------------------------


def _require(obj: Any, key: str, kind: type | tuple[type, ...], where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise InstanceError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool) and kind is int:
        raise InstanceError(f"{where}: field {key!r} has the wrong type")
    return val


def instance_from_document(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    sides: dict[str, list[str]] = {"agents": [], "jobs": []}
    capacity: dict[str, int] = {}
    preference: dict[str, list[str]] = {}
    for side in ("agents", "jobs"):
        for k, entry in enumerate(_require(doc, side, list, "instance")):
            where = f"{side}[{k}]"
            name = _require(entry, "name", str, where)
            cap = _require(entry, "capacity", int, where)
            prefs = _require(entry, "preferences", list, where)
            if not all(isinstance(u, str) for u in prefs):
                raise InstanceError(f"{where}: preferences must be vertex names")
            if name in capacity:
                raise InstanceError(f"duplicate vertex name {name!r}")
            sides[side].append(name)
            capacity[name] = cap
            preference[name] = prefs
    costs: dict[Edge, int] = {}
    for k, entry in enumerate(doc.get("costs") or []):
        where = f"costs[{k}]"
        e = (_require(entry, "agent", str, where), _require(entry, "job", str, where))
        if "cost" not in entry:
            raise InstanceError(f"{where}: missing field 'cost'")
        if e in costs:
            raise InstanceError(f"{where}: duplicate cost for {e}")
        costs[e] = parse_cost(entry["cost"])
    return Instance(sides["agents"], sides["jobs"], capacity, preference, costs)


def parse_instance(text: str | bytes) -> Instance:
    """Parse and validate an instance JSON document."""
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"syntax error: {exc}") from None
    return instance_from_document(doc)


def instance_to_document(inst: Instance) -> dict[str, Any]:
    def vertex(v: str) -> dict[str, Any]:
        return {"name": v, "capacity": inst.capacity[v], "preferences": list(inst.preference[v])}

    return {
        "agents": [vertex(a) for a in inst.agents],
        "jobs": [vertex(b) for b in inst.jobs],
        "costs": [
            {"agent": a, "job": b, "cost": format_cost(inst.cost[a, b])} for a, b in inst.edges
        ],
    }


def serialize_instance(inst: Instance) -> str:
    return dumps(instance_to_document(inst))


def matching_from_document(inst: Instance, doc: Any) -> Matching:
    if not isinstance(doc, dict):
        raise InstanceError("matching document must be a JSON object")
    edges = []
    for k, entry in enumerate(_require(doc, "edges", list, "matching")):
        where = f"edges[{k}]"
        e = (_require(entry, "agent", str, where), _require(entry, "job", str, where))
        if e in edges:
            raise InstanceError(f"{where}: duplicate edge {e}")
        edges.append(e)
    return check_matching(inst, edges)


def parse_matching(inst: Instance, text: str | bytes) -> Matching:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"syntax error: {exc}") from None
    return matching_from_document(inst, doc)


def matching_to_document(inst: Instance, m: Iterable[Edge]) -> dict[str, Any]:
    return {"edges": [{"agent": a, "job": b} for a, b in sorted_edges(inst, m)]}


def dumps(doc: Any) -> str:
    """Canonical JSON rendering used for every output document."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --- random instances ------------------------------------------------------


def _draw_instance(rng: random.Random, n_agents: int, n_jobs: int, max_cap: int,
                   density: float, cost_range: tuple[int, int]) -> Instance | None:
    agents = [f"a{i + 1}" for i in range(n_agents)]
    jobs = [f"b{j + 1}" for j in range(n_jobs)]
    nbrs: dict[str, list[str]] = {v: [] for v in agents + jobs}
    for a in agents:
        for b in jobs:
            if density >= 1 or rng.random() < density:
                nbrs[a].append(b)
                nbrs[b].append(a)
    if any(not ns for ns in nbrs.values()):
        return None
    for ns in nbrs.values():
        rng.shuffle(ns)
    capacity = {v: rng.randint(1, min(max_cap, len(ns))) for v, ns in nbrs.items()}
    cost = {
        (a, b): rng.randint(*cost_range) * COST_SCALE for a in agents for b in nbrs[a]
    }
    return Instance(agents, jobs, capacity, nbrs, cost)


def generate_instance(seed: int, n_agents: int, n_jobs: int, max_cap: int, density: float,
                      *, cost_range: tuple[int, int] = (0, 9),
                      max_retries: int = 10_000) -> Instance:
    """Draw a random perfect-matchable instance, deterministically in ``seed``.

    Each attempt uses ``random.Random(seed + attempt)``; attempts whose
    capacities do not admit a perfect matching are rejected.
    """
    if n_agents < 1 or n_jobs < 1 or max_cap < 1:
        raise InstanceError("n_agents, n_jobs and max_cap must be >= 1")
    if not 0 < density <= 1:
        raise InstanceError("density must lie in (0, 1]")
    for attempt in range(max_retries):
        inst = _draw_instance(random.Random(seed + attempt), n_agents, n_jobs, max_cap,
                              density, cost_range)
        if inst is not None and admits_perfect_matching(inst):
            return inst
    raise GenerationError(f"no perfect-matchable instance after {max_retries} attempts")
