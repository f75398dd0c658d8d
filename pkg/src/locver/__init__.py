"""Local distributed verification workbench."""

from . import core, games, iteration, lifts, pi2, reductions, schemes, zoo  # noqa: F401  (iteration registers ITER)
from .core import Configuration, Graph, LocalAlgorithm, ball, global_accept, run, views_isomorphic
from .errors import CodecRangeError, CoverError, DomainError, Inconclusive, ParseError, UsageError
from .zoo import get_language, language_names

__all__ = [
    "CodecRangeError", "Configuration", "CoverError", "DomainError", "Graph", "Inconclusive", "LocalAlgorithm",
    "ParseError", "UsageError", "ball", "get_language", "global_accept", "language_names", "run",
    "views_isomorphic",
]
