"""Executable requirements models: parse, check, animate, test, generate
tests, synthesize scenario behavior and refactor with regression checks."""

from amt.model import Model, ModelError, flatten, merge
from amt.syntax import ParseFailure, parse, print_model
from amt.wellformed import check_wellformed, lint

__version__ = "0.1.0"

__all__ = ["Model", "ModelError", "flatten", "merge", "ParseFailure", "parse",
           "print_model", "check_wellformed", "lint", "__version__"]
