"""Single-edge perturbations of a configuration and the discrete gradient."""
from __future__ import annotations

import enum
from fractions import Fraction
from typing import Callable

import numpy as np

from .percolation import Configuration, GiantComponent, giant_component
from .torus import edge_endpoints


class FlipCase(enum.Enum):
    """Cell of the (endpoint membership in C) x (state of e) table."""

    CASE1 = "Case1"  # both endpoints outside C, e closed
    CASE2 = "Case2"  # both endpoints outside C, e open
    CASE3 = "Case3"  # both endpoints in C, e closed
    CASE4A = "Case4a"  # both in C, e open, closing it keeps all of C
    CASE4B = "Case4b"  # both in C, e open, closing it loses vertices of C
    CASE5 = "Case5"  # exactly one endpoint in C, e closed
    CASE6 = "Case6"  # exactly one endpoint in C, e open: cannot happen


class InconsistentConfiguration(RuntimeError):
    """Raised when an open edge leaves the giant component (the impossible case)."""


def _check_edge(omega: Configuration, e: int) -> int:
    e = int(e)
    if not 0 <= e < omega.spec.edge_count:
        raise IndexError(f"edge {e} out of range [0, {omega.spec.edge_count})")
    return e


def flip(omega: Configuration, e: int) -> Configuration:
    e = _check_edge(omega, e)
    bits = omega.bits.copy()
    bits[e] ^= 1
    return Configuration(omega.spec, bits)


def with_edge(omega: Configuration, e: int, value: int) -> Configuration:
    e = _check_edge(omega, e)
    if omega.bits[e] == value:
        return omega
    return flip(omega, e)


def extremal_pair(omega: Configuration, e: int) -> tuple[Configuration, Configuration]:
    """``(min(omega, omega^e), max(omega, omega^e))``: e forced closed, e forced open."""
    return with_edge(omega, e, 0), with_edge(omega, e, 1)


def _as_exact(x):
    if hasattr(x, "as_fraction"):
        return x.as_fraction()
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return x


def grad(f: Callable[[Configuration], object], omega: Configuration, e: int):
    """``f(omega) - f(omega^e)``; exact whenever ``f`` is integer or rational valued."""
    return _as_exact(f(omega)) - _as_exact(f(flip(omega, e)))


def classify_case(
    omega: Configuration,
    e: int,
    giant: GiantComponent | None = None,
    flipped_giant: GiantComponent | None = None,
) -> FlipCase:
    e = _check_edge(omega, e)
    if giant is None:
        giant = giant_component(omega)
    x, y, _ = edge_endpoints(e, omega.spec)
    inside = (x in giant) + (y in giant)
    is_open = bool(omega.bits[e])
    if inside == 0:
        return FlipCase.CASE2 if is_open else FlipCase.CASE1
    if inside == 1:
        if is_open:
            raise InconsistentConfiguration(f"open edge {e} has exactly one endpoint in the giant component")
        return FlipCase.CASE5
    if not is_open:
        return FlipCase.CASE3
    if flipped_giant is None:
        flipped_giant = giant_component(flip(omega, e))
    lost = np.any(giant.mask & ~flipped_giant.mask)
    return FlipCase.CASE4B if lost else FlipCase.CASE4A
