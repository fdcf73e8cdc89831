"""The mini-CSP language: values, syntax, parser and systems."""

from .parser import ParseError, format_program, parse_program
from .syntax import Program
from .system import (
    Process,
    System,
    SystemDefinitionError,
    SystemFormatError,
    Violation,
    admits,
    check_dialect,
    instantiate,
    load_system,
    parse_system,
    write_system,
)
from .values import Atom, Int, Tagged, VarKey, Vertex

__all__ = [
    "Atom", "Int", "ParseError", "Process", "Program", "System", "SystemDefinitionError",
    "SystemFormatError", "Tagged", "VarKey", "Vertex", "Violation", "admits", "check_dialect",
    "format_program", "instantiate", "load_system", "parse_program", "parse_system", "write_system",
]
