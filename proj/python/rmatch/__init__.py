"""Python bindings for the rmatch random assignment toolkit."""

import json

from ._core import (
    BipartiteGraph,
    Error,
    GeneralGraph,
    InvalidArgument,
    NoMatching,
    NoPerfectMatching,
    OddVertexCount,
    ParseError,
    __version__,
    brute_force_bipartite,
    brute_force_general,
    catalog_names,
    generate,
    parse_graph,
    solve_assignment,
    solve_perfect_matching,
    solve_sequence,
    theory,
)
from ._core import catalog_defaults_text as _catalog_defaults_text
from ._core import run_catalog_text as _run_catalog_text


def catalog_defaults(name):
    """Resolved default configuration of a catalog entry."""
    return json.loads(_catalog_defaults_text(name))


def run_experiment(name, **overrides):
    """Runs a catalog entry and returns its summary document as a dict.

    Keyword arguments override configuration keys (n, trials, seed, ...),
    exactly as the corresponding command-line flags do.
    """
    if name not in catalog_names():
        raise InvalidArgument(f"unknown experiment '{name}'")
    config = {"experiment": name, **overrides}
    return json.loads(_run_catalog_text(json.dumps(config)))


__all__ = [
    "BipartiteGraph",
    "Error",
    "GeneralGraph",
    "InvalidArgument",
    "NoMatching",
    "NoPerfectMatching",
    "OddVertexCount",
    "ParseError",
    "__version__",
    "brute_force_bipartite",
    "brute_force_general",
    "catalog_defaults",
    "catalog_names",
    "generate",
    "parse_graph",
    "run_experiment",
    "solve_assignment",
    "solve_perfect_matching",
    "solve_sequence",
    "theory",
]
