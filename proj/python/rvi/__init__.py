"""Exact value iteration over reachable belief subsets of POMDPs."""

from ._rvi import (
    Model,
    ModelError,
    ParseError,
    Solution,
    UsageError,
    analyze,
    belief_update,
    elevator,
    example3,
    grid,
    loose_threshold,
    maze1,
    maze2,
    office,
    parse_pomdp,
    random_model,
    simulate,
    solve,
    strict_threshold,
)

__all__ = [
    "Model",
    "ModelError",
    "ParseError",
    "Solution",
    "UsageError",
    "analyze",
    "belief_update",
    "elevator",
    "example3",
    "grid",
    "loose_threshold",
    "maze1",
    "maze2",
    "office",
    "parse_pomdp",
    "random_model",
    "simulate",
    "solve",
    "strict_threshold",
]
