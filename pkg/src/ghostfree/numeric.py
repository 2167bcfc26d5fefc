"""Numeric policy and branch-free even functions of sqrt(s)."""

import math
from contextlib import contextmanager
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances shared by every module.

    Attributes
    ----------
    construction : float
        Bound for symplectic residuals and exact-construction checks.
    derived : float
        Bound for equalities between two independently derived quantities.
    region : float
        Margin used when classifying signs, definiteness and normalisability.
    pole : float
        Denominators smaller than this are treated as poles.
    series : float
        Below this |s| the even functions switch to their Taylor series.
    """

    construction: float = 1e-12
    derived: float = 1e-10
    region: float = 1e-9
    pole: float = 1e-9
    series: float = 1e-8


_policy = NumericPolicy()


def get_policy():
    return _policy


def set_policy(**overrides):
    """Replace fields of the global policy and return the previous one."""
    global _policy
    previous = _policy
    _policy = replace(_policy, **overrides)
    return previous


@contextmanager
def policy_override(**overrides):
    previous = set_policy(**overrides)
    try:
        yield _policy
    finally:
        globals()["_policy"] = previous


# cosh(sqrt(s)), sinh(sqrt(s))/sqrt(s) and tanh(sqrt(s))/sqrt(s) are entire in s
# (the last one up to poles on s < 0); evaluating them as functions of s avoids
# choosing a branch of sqrt(mu*tau).

def cosh_sqrt(s):
    if abs(s) < get_policy().series:
        return 1.0 + s / 2.0 + s * s / 24.0
    if s > 0:
        return math.cosh(math.sqrt(s))
    return math.cos(math.sqrt(-s))


def sinhc_sqrt(s):
    if abs(s) < get_policy().series:
        return 1.0 + s / 6.0 + s * s / 120.0
    if s > 0:
        r = math.sqrt(s)
        return math.sinh(r) / r
    r = math.sqrt(-s)
    return math.sin(r) / r


def tanhc_sqrt(s):
    if abs(s) < get_policy().series:
        return 1.0 - s / 3.0 + 2.0 * s * s / 15.0
    if s > 0:
        r = math.sqrt(s)
        return math.tanh(r) / r
    r = math.sqrt(-s)
    return math.tan(r) / r
