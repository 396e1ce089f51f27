"""The typicality events H_n^1..H_n^5, G_n, and the gradient-bound check."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np

from .cuts import (
    ExactRatio,
    PhiUndefined,
    epsilon_n,
    iso_profile,
    iso_value_from_profile,
    phi_and_top,
)
from .flips import FlipCase, InconsistentConfiguration, flip
from .percolation import Configuration, flip_giant_table, giant_component
from .torus import geometry


@dataclass(frozen=True)
class EventConstants:
    c1: float = 0.4
    c2: float = 0.1
    c3: float = 10.0
    c4: float = 0.01
    c5: float = 0.01
    c6: float = 0.1
    C_claim: float = 16.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"constant {f.name} must be positive, got {getattr(self, f.name)}")
        if not self.c2 < self.c3:
            raise ValueError(f"need c2 < c3, got c2={self.c2}, c3={self.c3}")


@dataclass
class FlipAnalysis:
    """Everything the events and gradient checks need about omega and each omega^e.

    Per-edge arrays are indexed by edge id.  ``phi_flip[e]`` is ``None`` when
    the giant component of ``omega^e`` has fewer than two vertices.
    """

    omega: Configuration
    mode: str
    giant_size: int
    phi: ExactRatio | None
    top: int | None
    profile: np.ndarray | None
    flip_giant_size: np.ndarray
    symdiff: np.ndarray
    cases: list
    phi_flip: list
    top_flip: list
    solves: int = 0

    @property
    def phi_defined(self) -> bool:
        return self.phi is not None

    def gradients(self) -> list:
        """Exact ``phi(omega) - phi(omega^e)`` per edge (``None`` where undefined)."""
        if self.phi is None:
            return [None] * len(self.phi_flip)
        base = self.phi.as_fraction()
        return [None if q is None else base - q.as_fraction() for q in self.phi_flip]


def _cases(omega: Configuration, in_giant: np.ndarray, symdiff: np.ndarray) -> list:
    _, ends = geometry(omega.spec)
    inside = in_giant[ends[:, 0]].astype(int) + in_giant[ends[:, 1]].astype(int)
    out = []
    for e in range(omega.spec.edge_count):
        is_open = bool(omega.bits[e])
        if inside[e] == 0:
            out.append(FlipCase.CASE2 if is_open else FlipCase.CASE1)
        elif inside[e] == 1:
            if is_open:
                raise InconsistentConfiguration(f"open edge {e} has exactly one endpoint in the giant component")
            out.append(FlipCase.CASE5)
        elif not is_open:
            out.append(FlipCase.CASE3)
        else:
            # closing an edge only splits clusters, so nothing lost means nothing changed
            out.append(FlipCase.CASE4A if symdiff[e] == 0 else FlipCase.CASE4B)
    return out


def _solve(omega: Configuration, C, mode: str):
    try:
        phi, top, profile = phi_and_top(omega, C, mode)
    except PhiUndefined:
        return None, None, None
    return phi, top, profile


def analyze_flips(omega: Configuration, mode: str = "exact") -> FlipAnalysis:
    """Solve omega and every single-edge flip, reusing results when nothing changes.

    A flip whose giant component keeps the same vertex set and whose edge
    does not lie inside it leaves the cluster graph untouched, so phi and
    the largest minimizer carry over without a new solve.
    """
    if mode not in ("exact", "brute"):
        raise ValueError(f"event checks need an optimal solver mode, got {mode!r}")
    C = giant_component(omega)
    phi, top, profile = _solve(omega, C, mode)
    solves = 1
    sizes, symdiff = flip_giant_table(omega, C)
    cases = _cases(omega, C.mask, symdiff)
    _, ends = geometry(omega.spec)
    internal = C.mask[ends[:, 0]] & C.mask[ends[:, 1]]
    phi_flip, top_flip = [], []
    for e in range(omega.spec.edge_count):
        if symdiff[e] == 0 and not internal[e]:
            phi_flip.append(phi)
            top_flip.append(top)
            continue
        w = flip(omega, e)
        pe, te, _ = _solve(w, giant_component(w), mode)
        solves += 1
        phi_flip.append(pe)
        top_flip.append(te)
    return FlipAnalysis(
        omega=omega,
        mode=mode,
        giant_size=C.size,
        phi=phi,
        top=top,
        profile=profile,
        flip_giant_size=sizes,
        symdiff=symdiff,
        cases=cases,
        phi_flip=phi_flip,
        top_flip=top_flip,
        solves=solves,
    )


@dataclass
class EventReport:
    h1: bool
    h2: bool
    h3: bool
    h4: bool
    h5: bool
    g: bool
    phi_defined: bool
    details: dict = field(default_factory=dict)

    @property
    def h_all(self) -> bool:
        return self.h1 and self.h2 and self.h3 and self.h4 and self.h5

    def as_dict(self) -> dict:
        return {
            "h1": self.h1, "h2": self.h2, "h3": self.h3, "h4": self.h4, "h5": self.h5,
            "g": self.g, "h_all": self.h_all, "phi_defined": self.phi_defined,
            "details": self.details,
        }


def _iso_value(analysis: FlipAnalysis, eps: float) -> float:
    if analysis.profile is not None:
        return iso_value_from_profile(analysis.profile, eps)[0]
    return iso_profile(analysis.omega, None, eps, mode=analysis.mode).value


def events_from_analysis(analysis: FlipAnalysis, k: EventConstants) -> EventReport:
    spec = analysis.omega.spec
    n, d = spec.n, spec.d
    volume = n ** d
    sqrt_n = math.sqrt(n)
    worst_edge = int(np.argmax(analysis.symdiff))
    details = {
        "giant_size": analysis.giant_size,
        "max_symdiff": int(analysis.symdiff[worst_edge]),
        "max_symdiff_edge": worst_edge,
    }
    h1 = analysis.giant_size > k.c1 * volume
    h3 = bool(np.all(analysis.symdiff <= sqrt_n))
    if analysis.phi is None:
        details["flag"] = "phi undefined: giant component has size %d" % analysis.giant_size
        return EventReport(h1, False, h3, False, False, False, False, details)

    phi = float(analysis.phi)
    h2 = k.c2 / n < phi < k.c3 / n
    h4 = analysis.top > k.c4 * volume
    undefined = [e for e, t in enumerate(analysis.top_flip) if t is None]
    tops = [t for t in analysis.top_flip if t is not None]
    min_top_flip = min(tops) if tops else None
    h5 = not undefined and min_top_flip > k.c5 * volume
    eps = epsilon_n(spec)
    iso = _iso_value(analysis, eps)
    g = iso >= k.c6 * n ** (d / eps - 1)
    details.update({
        "phi_num": analysis.phi.reduced().num,
        "phi_den": analysis.phi.reduced().den,
        "max_minimizer_size": analysis.top,
        "min_flip_max_minimizer_size": min_top_flip,
        "flip_phi_undefined_edges": undefined,
        "epsilon": eps,
        "iso_profile": iso,
    })
    return EventReport(h1, h2, h3, h4, h5, g, True, details)


def check_events(omega: Configuration, k: EventConstants | None = None, mode: str = "exact") -> EventReport:
    return events_from_analysis(analyze_flips(omega, mode), k or EventConstants())


@dataclass(frozen=True)
class GradientClaimReport:
    in_Hn: bool
    sup_grad: Fraction | None
    bound: float
    holds: bool | None  # None: omega is outside H_n, the claim says nothing
    undefined_edges: tuple[int, ...] = ()
    argmax_edge: int | None = None


def gradient_claim_from_analysis(analysis: FlipAnalysis, k: EventConstants) -> GradientClaimReport:
    report = events_from_analysis(analysis, k)
    spec = analysis.omega.spec
    bound = k.C_claim / spec.n ** spec.d
    grads = analysis.gradients()
    undefined = tuple(e for e, g in enumerate(grads) if g is None)
    defined = [(abs(g), e) for e, g in enumerate(grads) if g is not None]
    if defined:
        sup, arg = max(defined, key=lambda t: (t[0], -t[1]))
    else:
        sup, arg = None, None
    if not report.h_all:
        return GradientClaimReport(False, sup, bound, None, undefined, arg)
    return GradientClaimReport(True, sup, bound, sup <= Fraction(k.C_claim) / spec.n ** spec.d, undefined, arg)


def verify_gradient_claim(omega: Configuration, k: EventConstants | None = None, mode: str = "exact") -> GradientClaimReport:
    return gradient_claim_from_analysis(analyze_flips(omega, mode), k or EventConstants())
