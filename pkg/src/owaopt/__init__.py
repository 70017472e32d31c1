"""Min-OWA combinatorial optimization under discrete cost scenarios."""

from .algorithms import (
    AlgorithmReport,
    Certificate,
    brute_force_owa,
    minmax_bruteforce,
    solve_hurwicz_top2,
    solve_hurwicz_via_minmax,
    solve_min_average,
    solve_min_min,
    solve_minmax_aggregate,
    solve_owa_aggregate,
    solve_quantile_enum,
    solve_two_scenario_owa,
)
from .errors import (
    BudgetError,
    CapabilityError,
    DimensionError,
    EnumerationTooLarge,
    InfeasibleError,
    OwaError,
    ParameterError,
    ParseError,
)
from .instances import (
    Formula,
    gen_hurwicz_lift,
    gen_min3sat_gadget,
    gen_partition_gadget,
    gen_random,
    gen_tight_selection,
    parse_formula,
    read_instance,
    write_instance,
)
from .owa import (
    ScenarioSet,
    Solution,
    WeightClass,
    WeightKind,
    WeightVector,
    classify_weights,
    evaluate,
    owa_value,
    preset_weights,
)
from .pareto import approximate_pareto_set, exact_vector_query, fptas_min_owa
from .problems import (
    Arc,
    Bipartite,
    Cardinality,
    Digraph,
    Graph,
    ProblemInstance,
    ProblemKind,
    enumerate_feasible,
    is_feasible,
    solve_deterministic,
)

__version__ = "0.1.0"
