"""Slice rank, refined Schmidt rank and descent certificates for quartics."""

import json

from . import _strength
from ._strength import StrengthError

__all__ = [
    "StrengthError", "quad_rank", "slice_rank", "refined_rank", "generate", "verify",
    "descend", "battery", "c_const", "C_const", "D_const", "thmB_bound", "inequalities_pass",
]

DEFAULT_BUDGET = 10_000_000


def _cert_text(cert):
    if isinstance(cert, str):
        cert = json.loads(cert)
    if "certificate" in cert:
        cert = cert["certificate"]
    return json.dumps(cert)


def quad_rank(poly, n, field="F3"):
    """Rank of a quadric and its slice rank ceil(rank/2)."""
    return json.loads(_strength.quad_rank(poly, n, field))


def slice_rank(poly, n, field="F3", budget=DEFAULT_BUDGET):
    return json.loads(_strength.slice_rank(poly, n, field, budget))


def refined_rank(poly, n, r2, r1, field="F3", budget=DEFAULT_BUDGET):
    """Certificate for f in (q_1..q_r2, l_1..l_r1), or None."""
    return json.loads(_strength.refined_rank(poly, n, r2, r1, field, budget))


def generate(**spec):
    spec.setdefault("field", "F3(s-1)")
    return json.loads(_strength.generate(json.dumps(spec)))


def verify(cert):
    return _strength.verify(_cert_text(cert))


def descend(cert, pipeline="r1", budget=100_000_000):
    return json.loads(_strength.descend(_cert_text(cert), pipeline, budget))


def battery(seed=1, suites=None):
    return json.loads(_strength.battery(seed, dict(suites or {})))


def c_const(r, s, q0):
    return int(_strength.c_const(r, s, q0))


def C_const(r, q0):
    return int(_strength.C_const(r, q0))


def D_const(r, q0):
    return int(_strength.D_const(r, q0))


def thmB_bound(r):
    return int(_strength.thmB_bound(r))


def inequalities_pass(r_max=12, q_max=12):
    return _strength.inequalities_pass(r_max, q_max)
