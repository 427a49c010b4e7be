from .instance import (
    BqpInstance,
    load_instance,
    assemble_user_subproblem,
    assemble_item_subproblem,
)
from .solvers import (
    MAX_EXHAUSTIVE_DIM,
    solve_exhaustive,
    solve_flip_descent,
    solve_coordinate_descent,
    solve,
)


__all__ = [
    "BqpInstance",
    "load_instance",
    "assemble_user_subproblem",
    "assemble_item_subproblem",
    "MAX_EXHAUSTIVE_DIM",
    "solve_exhaustive",
    "solve_flip_descent",
    "solve_coordinate_descent",
    "solve",
]
