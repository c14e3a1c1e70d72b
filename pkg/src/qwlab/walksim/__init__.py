"""Monte-Carlo executions of subset-walk search algorithms with query counting."""

from .algorithms import (
    RunReport,
    WalkConfig,
    commute_3param_walk,
    commute_rowcol_walk,
    commute_set_walk,
    commute_simul_walk,
    ed_queries,
    ed_walk,
    freivalds_verify_walk,
    pair_commute_walk,
    pair_queries,
    rowcol_queries,
    set_queries,
    simul_queries,
    threeparam_queries,
    verify_queries,
)
from .instances import (
    DEFAULT_MODULUS,
    MatrixSetInstance,
    commuting_matrix_set,
    grouped_matrix_set,
    injective_function,
    load_function_instance,
    load_matrix_set,
    planted_collision_function,
    planted_pair_matrix_set,
    save_function_instance,
    save_matrix_set,
    verification_triple,
)
from .oracles import FunctionOracle, MatrixEntryOracle

__all__ = [
    "DEFAULT_MODULUS",
    "FunctionOracle",
    "MatrixEntryOracle",
    "MatrixSetInstance",
    "RunReport",
    "WalkConfig",
    "commute_3param_walk",
    "commute_rowcol_walk",
    "commute_set_walk",
    "commute_simul_walk",
    "commuting_matrix_set",
    "ed_queries",
    "ed_walk",
    "freivalds_verify_walk",
    "grouped_matrix_set",
    "injective_function",
    "load_function_instance",
    "load_matrix_set",
    "pair_commute_walk",
    "pair_queries",
    "planted_collision_function",
    "planted_pair_matrix_set",
    "rowcol_queries",
    "save_function_instance",
    "save_matrix_set",
    "set_queries",
    "simul_queries",
    "threeparam_queries",
    "verification_triple",
    "verify_queries",
]
