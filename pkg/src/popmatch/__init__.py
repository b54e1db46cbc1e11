"""Popular perfect matchings in capacitated bipartite preference instances."""

from .clone import (
    CycleWitness,
    PopularityVerdict,
    build_subgraph,
    clone,
    find_positive_alternating_cycle,
    is_popular_perfect,
    make_valid,
    realize,
    wt,
)
from .colorful import (
    ColorfulInstance,
    build_colorful_many,
    build_colorful_one,
    lift_to_stable,
    project,
)
from .errors import (
    EnumerationLimitError,
    GenerationError,
    InfeasibleError,
    InstanceError,
    InvariantViolation,
    PopMatchError,
)
from .instance import (
    Instance,
    admits_perfect_matching,
    generate_instance,
    is_perfect,
    parse_instance,
    serialize_instance,
)
from .solver import (
    SolveReport,
    brute_force_is_popular_perfect,
    enumerate_perfect_matchings,
    solve_min_cost,
)
from .stability import PreferenceSystem, SysEdge, deferred_acceptance, is_blocking, is_stable
from .voting import DUMMY, delta, vote, vote_set

__version__ = "0.1.0"
