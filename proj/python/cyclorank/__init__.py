"""p-adic regulators, Iwasawa invariants and prime sieves for elliptic curves over Q."""

import os
from pathlib import Path

from . import _core
from ._core import (
    CycloRankError,
    classify,
    count_points,
    euler_char_valuation,
    ingest,
    lambda_verdict,
    split_density,
)

__all__ = [
    "CycloRankError",
    "check",
    "classify",
    "count_points",
    "default_db",
    "error_code",
    "euler_char_valuation",
    "ingest",
    "lambda_verdict",
    "pi_scan",
    "prepare",
    "sieve",
    "split_density",
]


def default_db():
    """$CYCLORANK_DB, else the curve file shipped with the package."""
    env = os.environ.get("CYCLORANK_DB")
    if env:
        return env
    return str(Path(__file__).with_name("data") / "curves.txt")


def error_code(exc):
    return str(exc).split(":", 1)[0]


def check(curve, p, prec=20, db=None):
    return _core.check(curve, p, prec, db or default_db())


def pi_scan(curve, max_prime, jobs=0, prec=10, db=None):
    return _core.pi_scan(curve, max_prime, jobs, prec, db or default_db())


def sieve(curve, field_poly, max_prime, db=None):
    return _core.sieve(curve, field_poly, max_prime, db or default_db())


prepare = _core.prepare
