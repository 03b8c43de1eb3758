"""Python access to the route discovery simulator.

Scenarios are given as a file path or as JSON text. Results come back as
plain dicts and lists.
"""

from ._srpsim import ScenarioError, check, fuzz, list_attacks, run

__all__ = ["ScenarioError", "check", "fuzz", "list_attacks", "run"]
