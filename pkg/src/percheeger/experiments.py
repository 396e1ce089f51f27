"""Seeded Monte Carlo campaigns over (d, n, p).

Every sample owns a seed derived from the plan alone, so results never
depend on how many worker processes ran them or in which order.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cuts import ExactRatio, PhiUndefined, phi_and_top
from .events import EventConstants, EventReport, analyze_flips, events_from_analysis
from .flips import FlipCase
from .percolation import giant_component, sample_configuration, splitmix64
from .stats import RunningMoments, bootstrap_ci, wilson_interval
from .torus import TorusSpec

SOLVER_MODES = ("brute", "exact", "heuristic")
CASE_CODES = {case: i for i, case in enumerate(FlipCase)}
EVENT_KEYS = ("h1", "h2", "h3", "h4", "h5", "g", "h_all")
BOOTSTRAP_RESAMPLES = 1000


@dataclass(frozen=True)
class ExperimentPlan:
    d: int
    n_list: tuple[int, ...]
    p: float
    samples: int
    master_seed: int
    constants: EventConstants = field(default_factory=EventConstants)
    solver_mode: str = "exact"
    record_gradients: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if not self.n_list:
            raise ValueError("n_list must not be empty")
        bad = [n for n in self.n_list if n < 3]
        if bad:
            raise ValueError(f"n_list entries must be >= 3, got {bad}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.samples < 2:
            raise ValueError(f"samples must be >= 2, got {self.samples}")
        if self.solver_mode not in SOLVER_MODES:
            raise ValueError(f"solver_mode must be one of {SOLVER_MODES}, got {self.solver_mode!r}")
        if self.record_gradients and self.solver_mode == "heuristic":
            raise ValueError("gradients need an optimal solver mode")


def sample_seed(master_seed: int, n: int, index: int) -> int:
    """SplitMix64 of the sample index, on a stream keyed by (master seed, n)."""
    return splitmix64(splitmix64(master_seed, n), index)


@dataclass
class SampleRecord:
    n: int
    index: int
    seed: int
    giant_size: int
    phi: ExactRatio | None
    max_minimizer_size: int | None
    events: EventReport | None
    grad_num: np.ndarray | None = None  # per edge; grad_den == 0 marks undefined
    grad_den: np.ndarray | None = None
    cases: np.ndarray | None = None
    timing_ms: float = 0.0

    @property
    def phi_real(self) -> float | None:
        return None if self.phi is None else float(self.phi)

    def gradients(self) -> np.ndarray:
        g = np.full(self.grad_num.shape[0], np.nan)
        ok = self.grad_den != 0
        g[ok] = self.grad_num[ok] / self.grad_den[ok]
        return g


def run_sample(plan: ExperimentPlan, n: int, index: int) -> SampleRecord:
    t0 = time.perf_counter()
    spec = TorusSpec(plan.d, n)
    seed = sample_seed(plan.master_seed, n, index)
    omega = sample_configuration(spec, plan.p, seed)
    if plan.solver_mode == "heuristic":
        C = giant_component(omega)
        try:
            phi, top, _ = phi_and_top(omega, C, "heuristic")
        except PhiUndefined:
            phi, top = None, None
        rec = SampleRecord(n, index, seed, C.size, phi, top, None)
    else:
        analysis = analyze_flips(omega, plan.solver_mode)
        report = events_from_analysis(analysis, plan.constants)
        rec = SampleRecord(n, index, seed, analysis.giant_size, analysis.phi, analysis.top, report)
        if plan.record_gradients:
            grads = analysis.gradients()
            rec.grad_num = np.array([0 if g is None else g.numerator for g in grads], dtype=np.int64)
            rec.grad_den = np.array([0 if g is None else g.denominator for g in grads], dtype=np.int64)
            rec.cases = np.array([CASE_CODES[c] for c in analysis.cases], dtype=np.int8)
    rec.timing_ms = (time.perf_counter() - t0) * 1e3
    return rec


def _run_batch(args):
    plan, n, indices = args
    return [run_sample(plan, n, i) for i in indices]


def run_samples(plan: ExperimentPlan, workers: int = 1, chunk: int = 50) -> dict[int, list[SampleRecord]]:
    """All sample records per n, in sample-index order."""
    out = {}
    for n in plan.n_list:
        jobs = [(plan, n, list(range(s, min(s + chunk, plan.samples)))) for s in range(0, plan.samples, chunk)]
        if workers <= 1:
            batches = map(_run_batch, jobs)
            out[n] = [r for b in batches for r in b]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                out[n] = [r for b in pool.map(_run_batch, jobs) for r in b]
    return out


# ---------------------------------------------------------------------------
# summaries


@dataclass
class SummaryStats:
    n: int
    samples: int
    censored: int
    mean_phi: float
    var_phi: float
    var_phi_streaming: float
    n_mean: float
    scaled_var: float
    mean_ci: tuple[float, float]
    var_ci: tuple[float, float]
    n_mean_ci: tuple[float, float]
    scaled_var_ci: tuple[float, float]
    n_phi_min: float
    n_phi_max: float
    event_frequencies: dict = field(default_factory=dict)
    sup_grad: float | None = None
    sup_scaled_grad: float | None = None
    talagrand_sum: float | None = None


def _bootstrap_rng(plan: ExperimentPlan, n: int, salt: int) -> np.random.Generator:
    return np.random.default_rng(splitmix64(plan.master_seed ^ (salt << 32), n))


def _records(plan, records, workers):
    return records if records is not None else run_samples(plan, workers)


def _phi_values(recs) -> np.ndarray:
    return np.array([r.phi_real for r in recs if r.phi is not None], dtype=float)


def _event_frequencies(recs) -> dict:
    evs = [r.events for r in recs if r.events is not None]
    if not evs:
        return {}
    d = {key: sum(bool(getattr(e, key)) for e in evs) / len(evs) for key in EVENT_KEYS}
    return d


def _gradient_matrix(recs) -> np.ndarray | None:
    rows = [r.gradients() for r in recs if r.grad_num is not None]
    return np.vstack(rows) if rows else None


def run_variance_experiment(plan: ExperimentPlan, records=None, workers: int = 1) -> dict[int, SummaryStats]:
    records = _records(plan, records, workers)
    out = {}
    for n in plan.n_list:
        recs = records[n]
        phis = _phi_values(recs)
        censored = len(recs) - phis.shape[0]
        if phis.shape[0] < 2:
            raise ValueError(f"n={n}: fewer than two uncensored samples ({censored} censored)")
        vol = n ** plan.d
        mean = float(phis.mean())
        var = float(phis.var(ddof=1))
        rng = _bootstrap_rng(plan, n, 1)
        mean_ci, _ = bootstrap_ci(phis, np.mean, rng, BOOTSTRAP_RESAMPLES)
        var_ci, _ = bootstrap_ci(phis, lambda x: x.var(ddof=1), rng, BOOTSTRAP_RESAMPLES)
        stats = SummaryStats(
            n=n,
            samples=len(recs),
            censored=censored,
            mean_phi=mean,
            var_phi=var,
            var_phi_streaming=RunningMoments().extend(phis).variance,
            n_mean=n * mean,
            scaled_var=vol * var,
            mean_ci=tuple(mean_ci),
            var_ci=tuple(var_ci),
            n_mean_ci=(n * mean_ci[0], n * mean_ci[1]),
            scaled_var_ci=(vol * var_ci[0], vol * var_ci[1]),
            n_phi_min=float(n * phis.min()),
            n_phi_max=float(n * phis.max()),
            event_frequencies=_event_frequencies(recs),
        )
        G = _gradient_matrix(recs)
        if G is not None and np.isfinite(G).any():
            stats.sup_grad = float(np.nanmax(np.abs(G)))
            stats.sup_scaled_grad = vol * stats.sup_grad
            stats.talagrand_sum = _talagrand_terms(G[np.isfinite(G).all(axis=1)])[0]
        out[n] = stats
    return out


def trend_table(stats: dict[int, SummaryStats]) -> dict:
    """Cross-n ratios of the scaled variance and of n * mean(phi)."""
    sv = [s.scaled_var for s in stats.values()]
    nm = [s.n_mean for s in stats.values()]
    return {
        "n": list(stats),
        "scaled_var": sv,
        "n_mean_phi": nm,
        "scaled_var_ratio": max(sv) / min(sv) if min(sv) > 0 else math.inf,
        "n_mean_ratio": max(nm) / min(nm) if min(nm) > 0 else math.inf,
        "band_observed": (min(s.n_phi_min for s in stats.values()), max(s.n_phi_max for s in stats.values())),
        "note": "empirical surrogates; the constants of the variance and band bounds are not identified",
    }


def estimate_event_probabilities(plan: ExperimentPlan, records=None, workers: int = 1) -> dict:
    if plan.solver_mode == "heuristic":
        raise ValueError("event probabilities need an optimal solver mode")
    records = _records(plan, records, workers)
    table = {}
    for n in plan.n_list:
        evs = [r.events for r in records[n]]
        row = {}
        for key in EVENT_KEYS:
            hits = sum(bool(getattr(e, key)) for e in evs)
            row[key] = {"freq": hits / len(evs), "ci": wilson_interval(hits, len(evs)), "count": hits}
        row["trials"] = len(evs)
        table[n] = row
    comp = [1 - table[n]["h_all"]["freq"] for n in plan.n_list]
    h1_fail = [1 - table[n]["h1"]["freq"] for n in plan.n_list]
    table["trend"] = {
        "complement_h_all": comp,
        "complement_h_all_nonincreasing": all(a >= b for a, b in zip(comp, comp[1:])),
        "complement_h1": h1_fail,
        "complement_h1_nonincreasing": all(a >= b for a, b in zip(h1_fail, h1_fail[1:])),
    }
    return table


def _talagrand_terms(G: np.ndarray):
    """Full log-corrected sum, per-edge terms, second and first absolute moments."""
    l2sq = np.mean(G * G, axis=0)
    l1 = np.mean(np.abs(G), axis=0)
    terms = np.zeros_like(l2sq)
    nz = l1 > 0
    ratio = np.maximum(np.sqrt(l2sq[nz]) / l1[nz], 1.0)
    terms[nz] = l2sq[nz] / (1.0 + np.log(ratio))
    return float(terms.sum()), terms, l2sq, l1


def talagrand_diagnostic(plan: ExperimentPlan, records=None, workers: int = 1, edge: int = 0) -> dict:
    """The sum Talagrand's inequality multiplies by K, with a single-edge check.

    ``single_edge_estimate`` is ``d n^d`` times the same log-corrected term
    evaluated at one edge (translation symmetry makes all terms equal in
    law); ``single_edge_bound`` drops the log correction.
    """
    if not plan.record_gradients or plan.solver_mode == "heuristic":
        raise ValueError("talagrand_diagnostic needs recorded gradients from an optimal solver")
    records = _records(plan, records, workers)
    out = {}
    for n in plan.n_list:
        G = _gradient_matrix(records[n])
        if G is None:
            raise ValueError(f"n={n}: no gradient records")
        complete = np.isfinite(G).all(axis=1)
        G = G[complete]
        m = G.shape[1]
        total, terms, l2sq, l1 = _talagrand_terms(G)
        single = m * terms[edge]

        def gap(rows):
            t, tm, _, _ = _talagrand_terms(rows)
            return t - m * tm[edge]

        def full(rows):
            return _talagrand_terms(rows)[0]

        rng = _bootstrap_rng(plan, n, 2)
        _, gap_se = bootstrap_ci(G, gap, rng, BOOTSTRAP_RESAMPLES)
        _, sum_se = bootstrap_ci(G, full, rng, BOOTSTRAP_RESAMPLES)
        naive = float(l2sq.sum())
        ratios = np.sqrt(l2sq[l1 > 0]) / l1[l1 > 0]
        out[n] = {
            "sum_all_edges": total,
            "single_edge_estimate": float(single),
            "single_edge_bound": float(m * l2sq[edge]),
            "scaled": n ** plan.d * total,
            "sum_bootstrap_se": sum_se,
            "gap_bootstrap_se": gap_se,
            "naive_sum": naive,
            "max_norm_ratio": float(ratios.max()) if ratios.size else 1.0,
            "samples_used": int(G.shape[0]),
            "samples_dropped": int((~complete).sum()),
        }
    return out


HIST_EDGES = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, math.inf)


def gradient_tail_summary(plan: ExperimentPlan, records=None, workers: int = 1) -> dict:
    """Largest gradients overall and on H_n, and per-case tails of n^d |grad|."""
    if not plan.record_gradients:
        raise ValueError("gradient_tail_summary needs record_gradients")
    records = _records(plan, records, workers)
    cases = list(FlipCase)
    out = {"per_n": {}, "max_abs_grad": 0.0, "hist_edges": HIST_EDGES}
    for n in plan.n_list:
        vol = n ** plan.d
        overall = Fraction(0)
        in_hn = Fraction(0)
        hn_samples = 0
        per_case = {c.value: {"count": 0, "nonzero": 0, "max_scaled": 0.0, "histogram": [0] * (len(HIST_EDGES) - 1)}
                    for c in cases}
        for r in records[n]:
            if r.grad_num is None:
                continue
            ok = r.grad_den != 0
            sup = max((Fraction(int(a), int(b)) for a, b in zip(np.abs(r.grad_num[ok]), r.grad_den[ok])), default=Fraction(0))
            overall = max(overall, sup)
            if r.events is not None and r.events.h_all:
                hn_samples += 1
                in_hn = max(in_hn, sup)
            scaled = np.abs(r.gradients()) * vol
            for code, case in enumerate(cases):
                sel = (r.cases == code) & ok
                if not sel.any():
                    continue
                vals = scaled[sel]
                row = per_case[case.value]
                row["count"] += int(sel.sum())
                row["nonzero"] += int(np.count_nonzero(vals))
                row["max_scaled"] = max(row["max_scaled"], float(vals.max()))
                hist, _ = np.histogram(vals, bins=HIST_EDGES)
                row["histogram"] = [a + int(b) for a, b in zip(row["histogram"], hist)]
        if overall > 4 * plan.d:
            raise AssertionError(f"n={n}: |grad phi| = {float(overall)} exceeds 4d = {4 * plan.d}")
        out["per_n"][n] = {
            "max_abs_grad": float(overall),
            "max_scaled_grad_in_Hn": float(in_hn * vol),
            "samples_in_Hn": hn_samples,
            "per_case": per_case,
        }
        out["max_abs_grad"] = max(out["max_abs_grad"], float(overall))
    vals = [v["max_scaled_grad_in_Hn"] for v in out["per_n"].values()]
    out["scaled_in_Hn_ratio"] = max(vals) / min(vals) if vals and min(vals) > 0 else math.inf
    return out
