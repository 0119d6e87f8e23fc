"""Python front end for the fox interpreter and refinement checker.

All probabilities are returned as fractions.Fraction.
"""

import json
from fractions import Fraction

try:
    from . import _fox
except ImportError:  # in-tree use: the extension sits in the build directory
    import _fox

ParseError = _fox.ParseError
TypeError = _fox.TypeError


def _sup(d):
    return {
        "value": Fraction(d["value"]),
        "saturated": d["saturated"],
        "limit": None if d["limit"] is None else Fraction(d["limit"]),
        "nodes": d["nodes"],
    }


def typecheck(source):
    return _fox.typecheck(source)


def sup_term(source, depth, workers=1):
    """Depth-bounded supremum of termination probability over schedulers."""
    return _sup(_fox.sup_term(source, depth, workers))


def sup_value(source, value, depth):
    """Depth-bounded supremum of the mass on one value literal."""
    return _sup(_fox.sup_value(source, value, depth))


def run(source, depth, seed=None):
    """Value distribution of thread 0 under round-robin, or a seeded random scheduler."""
    rows = _fox.run(source, depth, seed or 0, seed is not None)
    return {v: Fraction(p) for v, p in rows}


def refine(left, right, depth, probes=(), equiv=False):
    report = json.loads(_fox.refine_json(left, right, depth, list(probes), equiv))
    return report


def min_eps(mu1, mu2, rel):
    """Least eps with an (eps, rel) approximate coupling of mu1 and mu2 (dicts of weights)."""
    as_str = lambda mu: {str(k): str(Fraction(w)) for k, w in mu.items()}
    return Fraction(_fox.min_eps(as_str(mu1), as_str(mu2), {(str(a), str(b)) for a, b in rel}))


def check_query(json_text):
    """(min eps, budget) for a coupling query document."""
    got, budget = _fox.min_eps_query(json_text)
    return Fraction(got), Fraction(budget)


def corpus():
    return _fox.corpus()


def validate_fisch_lemmas(instances=50, max_depth=4):
    return _fox.validate_fisch_lemmas(instances, max_depth)
