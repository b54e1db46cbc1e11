"""Command-line front end.

Every subcommand writes one JSON document (to ``--out`` or stdout) and a
short human-readable summary to stderr.

Exit codes: 0 success, 1 invalid input, 2 infeasible (no perfect matching),
3 ``verify`` found the matching not popular, 4 internal invariant violation,
5 enumeration cap (POPMATCH_MAX_ENUM) exceeded.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from .clone import build_subgraph, clone, is_popular_perfect, realize
from .colorful import (
    build_colorful_many,
    build_colorful_one,
    colorful_instance_to_document,
    colorful_matching_to_document,
    lift_to_stable,
    project,
)
from .errors import (
    EnumerationLimitError,
    GenerationError,
    InfeasibleError,
    InstanceError,
    InvariantViolation,
)
from .instance import (
    Instance,
    Matching,
    admits_perfect_matching,
    dumps,
    format_cost,
    generate_instance,
    instance_to_document,
    is_perfect,
    matching_cost,
    matching_to_document,
    parse_instance,
    parse_matching,
    sorted_edges,
)
from .solver import enumerate_perfect_matchings, solve_min_cost
from .stability import deferred_acceptance, system_from_instance
from .voting import delta

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_NOT_POPULAR, EXIT_BUG, EXIT_ENUM_LIMIT = range(6)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        raise _UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None


def _load_instance(path: str) -> Instance:
    return parse_instance(_read(path))


def _load_matching(inst: Instance, path: str) -> Matching:
    return parse_matching(inst, _read(path))


def _emit(doc: Any, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_validate(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    feasible = admits_perfect_matching(inst)
    _emit({
        "valid": True,
        "agents": len(inst.agents),
        "jobs": len(inst.jobs),
        "edges": len(inst.edges),
        "perfect_matchable": feasible,
    }, args.out)
    _say(f"valid instance; perfect matching {'exists' if feasible else 'does not exist'}")
    return EXIT_OK


def cmd_stable(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    if args.colorful:
        gstar = build_colorful_many(inst)
        m_star = deferred_acceptance(gstar.system)
        m = project(m_star)
        doc = colorful_matching_to_document(inst, m_star)
    else:
        m = frozenset(e.base for e in deferred_acceptance(system_from_instance(inst)))
        doc = matching_to_document(inst, m)
    perfect = is_perfect(inst, m)
    doc["perfect"] = perfect
    _emit(doc, args.out)
    _say(f"stable matching with {len(m)} edges ({'perfect' if perfect else 'not perfect'})")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    m = _load_matching(inst, args.matching)
    verdict = is_popular_perfect(inst, m)
    doc: dict[str, Any] = {"verdict": "popular" if verdict.popular else "not popular"}
    if verdict.popular:
        doc["witness"] = None
    else:
        doc["witness"] = matching_to_document(inst, verdict.witness)
        doc["delta"] = verdict.delta
        doc["cycle"] = [{"agent": a, "job": b} for a, b in verdict.cycle.edges]
    _emit(doc, args.out)
    if verdict.popular:
        _say("popular perfect matching")
        return EXIT_OK
    _say(f"not popular: witness beats it by {-verdict.delta}")
    return EXIT_NOT_POPULAR


def cmd_compare(args: argparse.Namespace) -> int:
    if len(args.matching) != 2:
        raise _UsageError("compare needs exactly two --matching files")
    inst = _load_instance(args.file)
    m1, m2 = (_load_matching(inst, p) for p in args.matching)
    d = delta(inst, m1, m2)
    _emit({"delta": d.value, "per_vertex": d.per_vertex}, args.out)
    _say(f"delta(M1, M2) = {d.value}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    rep = solve_min_cost(inst)
    _emit({
        "matching": matching_to_document(inst, rep.matching),
        "cost": format_cost(rep.cost),
        "cost_scaled": rep.cost,
        "perfect_matchings": rep.n_perfect,
        "popular_perfect_matchings": rep.n_popular,
        "certificate": rep.certificate,
    }, args.out)
    _say(f"min-cost popular perfect matching: cost {format_cost(rep.cost)} "
         f"({rep.n_popular} of {rep.n_perfect} perfect matchings are popular)")
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    if not admits_perfect_matching(inst):
        raise InfeasibleError("instance admits no perfect matching")
    cloned = clone(inst)
    entries = []
    for m in enumerate_perfect_matchings(inst):
        popular = is_popular_perfect(inst, m, cloned).popular
        if args.popular_only and not popular:
            continue
        entries.append({
            "edges": matching_to_document(inst, m)["edges"],
            "popular": popular,
            "cost": format_cost(matching_cost(inst, m)),
        })
    _emit({"count": len(entries), "matchings": entries}, args.out)
    _say(f"{len(entries)} {'popular ' if args.popular_only else ''}perfect matchings")
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    if args.gstar:
        doc = colorful_instance_to_document(build_colorful_many(inst), "gstar")
    else:
        if not args.matching:
            raise _UsageError("reduce --gm needs --matching")
        m = _load_matching(inst, args.matching)
        cloned = clone(inst)
        real = realize(inst, m, cloned)
        sub = build_subgraph(cloned, real)
        doc = colorful_instance_to_document(build_colorful_one(sub), "g0")
        doc["realization"] = [
            {"agent": a, "job": b, "clone_agent": real.mapping[a, b][0],
             "clone_job": real.mapping[a, b][1]}
            for a, b in sorted_edges(inst, m)
        ]
    _emit(doc, args.out)
    _say(f"{doc['kind']} with {doc['colors']} colors")
    return EXIT_OK


def cmd_lift(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    m = _load_matching(inst, args.matching)
    lifted = lift_to_stable(inst, m)
    if lifted is None:
        _emit({"found": False, "edges": []}, args.out)
        _say("no coloring of this matching is stable in G*")
    else:
        _emit({"found": True, **colorful_matching_to_document(inst, lifted)}, args.out)
        _say("stable coloring found")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    inst = generate_instance(args.seed, args.agents, args.jobs, args.max_cap, args.density)
    _emit(instance_to_document(inst), args.out)
    _say(f"generated instance with {len(inst.edges)} edges")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="popmatch", description="Popular perfect matchings in many-to-many instances.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, func, help: str, with_file: bool = True) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        if with_file:
            sp.add_argument("file", help="instance document")
        sp.add_argument("--out", help="write the JSON result here instead of stdout")
        sp.set_defaults(func=func)
        return sp

    command("validate", cmd_validate, "validate an instance document")
    sp = command("stable", cmd_stable, "deferred acceptance on G (or G* with --colorful)")
    sp.add_argument("--colorful", action="store_true")
    sp = command("verify", cmd_verify, "decide popularity of a perfect matching")
    sp.add_argument("--matching", required=True)
    sp = command("compare", cmd_compare, "delta between two matchings")
    sp.add_argument("--matching", action="append", required=True)
    command("solve", cmd_solve, "min-cost popular perfect matching")
    sp = command("enumerate", cmd_enumerate, "list perfect matchings")
    sp.add_argument("--popular-only", action="store_true")
    sp = command("reduce", cmd_reduce, "emit G* or G0_M' as JSON")
    which = sp.add_mutually_exclusive_group(required=True)
    which.add_argument("--gstar", action="store_true")
    which.add_argument("--gm", action="store_true")
    sp.add_argument("--matching")
    sp = command("lift", cmd_lift, "find a coloring of a matching that is stable in G*")
    sp.add_argument("--matching", required=True)
    sp = command("gen", cmd_gen, "generate a random perfect-matchable instance", with_file=False)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--agents", type=int, required=True)
    sp.add_argument("--jobs", type=int, required=True)
    sp.add_argument("--max-cap", type=int, required=True)
    sp.add_argument("--density", type=float, required=True)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        _say(str(exc))
        return EXIT_INVALID
    except (InstanceError, GenerationError) as exc:
        _say(f"invalid input: {exc}")
        return EXIT_INVALID
    except InfeasibleError as exc:
        _say(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except EnumerationLimitError as exc:
        _say(f"enumeration limit: {exc}")
        return EXIT_ENUM_LIMIT
    except InvariantViolation as exc:
        _say(f"internal invariant violated: {exc}")
        return EXIT_BUG


def main() -> None:
    sys.exit(run())
