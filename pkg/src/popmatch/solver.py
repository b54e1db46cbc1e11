"""Exact desk-scale min-cost popular perfect matching and brute-force oracles."""

from __future__ import annotations

import os
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import combinations

from .clone import clone, is_popular_perfect
from .errors import EnumerationLimitError, InfeasibleError, InstanceError, InvariantViolation
from .instance import (
    Edge,
    Instance,
    Matching,
    admits_perfect_matching,
    check_matching,
    is_perfect,
    matching_cost,
    matching_key,
)
from .voting import delta

DEFAULT_MAX_ENUM = 10**7


def max_enum() -> int:
    raw = os.environ.get("POPMATCH_MAX_ENUM")
    if raw is None:
        return DEFAULT_MAX_ENUM
    try:
        value = int(raw)
    except ValueError:
        raise InstanceError(f"POPMATCH_MAX_ENUM must be an integer, got {raw!r}") from None
    if value < 1:
        raise InstanceError("POPMATCH_MAX_ENUM must be positive")
    return value


def enumerate_perfect_matchings(inst: Instance, limit: int | None = None) -> Iterator[Matching]:
    """Yield every perfect matching once, in a fixed order.

    Agents are filled in document order; each picks ``cap(a)`` distinct
    neighbours (by job index) among jobs with spare capacity.  ``limit``
    defaults to ``POPMATCH_MAX_ENUM``.
    """
    if inst.agent_capacity != inst.job_capacity:
        raise InfeasibleError(
            f"total agent capacity {inst.agent_capacity} != total job capacity {inst.job_capacity}"
        )
    limit = max_enum() if limit is None else limit
    agents = inst.agents
    nbrs = [sorted(inst.preference[a], key=inst.index.__getitem__) for a in agents]
    spare = dict((b, inst.capacity[b]) for b in inst.jobs)
    # later[k][b]: how many of agents k.. can still reach job b
    later = [dict.fromkeys(inst.jobs, 0) for _ in range(len(agents) + 1)]
    for k in range(len(agents) - 1, -1, -1):
        later[k].update(later[k + 1])
        for b in nbrs[k]:
            later[k][b] += 1
    chosen: list[Edge] = []
    count = 0

    def fill(k: int) -> Iterator[Matching]:
        nonlocal count
        if k == len(agents):
            count += 1
            if count > limit:
                raise EnumerationLimitError(f"more than {limit} perfect matchings")
            yield frozenset(chosen)
            return
        a = agents[k]
        open_jobs = [b for b in nbrs[k] if spare[b] > 0]
        for pick in combinations(open_jobs, inst.capacity[a]):
            for b in pick:
                spare[b] -= 1
            if all(spare[b] <= later[k + 1][b] for b in nbrs[k]):
                chosen.extend((a, b) for b in pick)
                yield from fill(k + 1)
                del chosen[len(chosen) - len(pick):]
            for b in pick:
                spare[b] += 1

    if any(spare[b] > later[0][b] for b in inst.jobs):
        return
    yield from fill(0)


def brute_force_is_popular_perfect(inst: Instance, m: Iterable[Edge],
                                   perfect: Iterable[Matching] | None = None) -> bool:
    """Definition check: ``delta(m, n) >= 0`` against every perfect ``n``."""
    m = check_matching(inst, m)
    if not is_perfect(inst, m):
        raise InstanceError("matching is not perfect")
    pool = enumerate_perfect_matchings(inst) if perfect is None else perfect
    return all(delta(inst, m, n).value >= 0 for n in pool if n != m)


@dataclass(frozen=True)
class SolveReport:
    matching: Matching
    cost: int
    n_perfect: int
    n_popular: int
    certificate: str


def solve_min_cost(inst: Instance) -> SolveReport:
    """Cheapest popular perfect matching; ties go to the lexicographically
    smallest edge list."""
    if not admits_perfect_matching(inst):
        raise InfeasibleError("instance admits no perfect matching")
    cloned = clone(inst)
    best: tuple[int, tuple, Matching] | None = None
    n_perfect = n_popular = 0
    for m in enumerate_perfect_matchings(inst):
        n_perfect += 1
        if not is_popular_perfect(inst, m, cloned).popular:
            continue
        n_popular += 1
        cand = (matching_cost(inst, m), matching_key(inst, m), m)
        if best is None or cand[:2] < best[:2]:
            best = cand
    if best is None:
        raise InvariantViolation("no popular perfect matching found in a feasible instance")
    cost, _, m = best
    return SolveReport(
        m, cost, n_perfect, n_popular,
        "no alternating cycle of positive weight exists in G'_M' for the "
        "canonical realization M' of the returned matching",
    )
