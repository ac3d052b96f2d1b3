"""Demand-driven Datalog with stratified negation.

Queries are answered by rewriting the program with demand and complement
predicates and evaluating the result bottom up, one fact at a time.
"""
from .frontend import load_program, parse_atom, parse_program, parse_query, render_program
from .model import (
    DatalogError, FlounderingError, NotStratifiedError, Program, Query, UnknownPredicateError,
    ValidationError,
)
from .pipeline import solve

__version__ = "0.1.0"

__all__ = [
    "DatalogError", "FlounderingError", "NotStratifiedError", "Program", "Query",
    "UnknownPredicateError", "ValidationError", "load_program", "parse_atom",
    "parse_program", "parse_query", "render_program", "solve",
]
