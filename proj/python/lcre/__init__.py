"""Constrained equational reasoning over LCTRS theories."""

import json as _json

from ._lcre import LcreError, ParseError, Theory, check_proof, consistency, refute
from ._lcre import run as _run


def run(command, theory, **options):
    """Run a CLI command in-process. Returns the parsed JSON report."""
    _, _, report = _run(command, str(theory), **options)
    return _json.loads(report)


__all__ = ["LcreError", "ParseError", "Theory", "check_proof", "consistency", "refute", "run"]
