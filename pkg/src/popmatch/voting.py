"""Votes of a vertex over neighbours, neighbour sets, and whole matchings.

A vertex compares two neighbour sets by pairing the elements only one side
holds in the way that is least favourable to the first set; the smaller side
is padded with dummies ranked below every real neighbour.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InstanceError
from .instance import Edge, Instance, check_matching, partners


class _Dummy:
    __slots__ = ()

    def __repr__(self) -> str:
        return "DUMMY"


DUMMY = _Dummy()

Slot = Union[str, _Dummy]


@dataclass(frozen=True)
class SetVote:
    value: int
    pairing: tuple[tuple[Slot, Slot], ...]


@dataclass(frozen=True)
class DeltaValue:
    value: int
    per_vertex: dict[str, int]


def _check_neighbor(inst: Instance, v: str, u: Slot) -> None:
    if u is not DUMMY and u not in inst.rank.get(v, {}):
        raise InstanceError(f"{u!r} is not a neighbour of {v!r}")


def vote(inst: Instance, v: str, u: Slot, w: Slot) -> int:
    """+1 if ``v`` prefers ``u`` to ``w``, -1 if the reverse, 0 if equal."""
    _check_neighbor(inst, v, u)
    _check_neighbor(inst, v, w)
    return _vote(inst.rank[v], u, w)


def _vote(rank: dict[str, int], u: Slot, w: Slot) -> int:
    if u is w or u == w:
        return 0
    if w is DUMMY:
        return 1
    if u is DUMMY:
        return -1
    return 1 if rank[u] < rank[w] else -1


def vote_set(inst: Instance, v: str, s: Iterable[str], t: Iterable[str]) -> SetVote:
    """Adversarial comparison of neighbour sets ``s`` and ``t`` by ``v``.

    The minimising bijection is found as a min-cost assignment on the
    matrix of pairwise votes.
    """
    s, t = frozenset(s), frozenset(t)
    for u in s | t:
        _check_neighbor(inst, v, u)
    key = ("vote_set", v, s, t)
    cached = inst.memo.get(key)
    if cached is None:
        cached = inst.memo[key] = _vote_set(inst.rank[v], s, t)
    return cached


def _vote_set(rank: dict[str, int], s: frozenset[str], t: frozenset[str]) -> SetVote:
    only_s = sorted(s - t, key=rank.__getitem__)
    only_t = sorted(t - s, key=rank.__getitem__)
    k = max(len(only_s), len(only_t))
    if k == 0:
        return SetVote(0, ())
    left: list[Slot] = only_s + [DUMMY] * (k - len(only_s))
    right: list[Slot] = only_t + [DUMMY] * (k - len(only_t))
    votes = np.array([[_vote(rank, x, y) for y in right] for x in left], dtype=np.int64)
    rows, cols = linear_sum_assignment(votes)
    pairing = tuple((left[i], right[j]) for i, j in zip(rows, cols))
    return SetVote(int(votes[rows, cols].sum()), pairing)


def delta(inst: Instance, m: Iterable[Edge], n: Iterable[Edge]) -> DeltaValue:
    """Sum over all vertices of their set votes for ``m`` versus ``n``.

    A positive value means ``m`` is more popular than ``n``.
    """
    m = check_matching(inst, m)
    n = check_matching(inst, n)
    pm, pn = partners(m), partners(n)
    per_vertex = {}
    for v in inst.vertices:
        per_vertex[v] = vote_set(inst, v, pm.get(v, ()), pn.get(v, ())).value
    return DeltaValue(sum(per_vertex.values()), per_vertex)
