"""File formats: configurations, plans, constants, JSONL records, CSV summaries."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import fields
from importlib import resources
from pathlib import Path

import numpy as np

from .cuts import CheegerResult
from .events import EventConstants, EventReport
from .experiments import SOLVER_MODES, ExperimentPlan, SampleRecord, SummaryStats
from .percolation import Configuration
from .torus import TorusSpec

MAGIC = "PERC1"
TIMING_KEYS = ("timing_ms",)


class FormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration files


def format_configuration(omega: Configuration, comments: dict | None = None) -> str:
    lines = [f"{MAGIC} {omega.spec.d} {omega.spec.n}", omega.to_string()]
    for key, value in (comments or {}).items():
        lines.append(f"# {key}={value}")
    return "\n".join(lines) + "\n"


def parse_configuration(text: str) -> tuple[Configuration, dict]:
    """Parse a configuration file; returns it with its ``# key=value`` comments."""
    lines = text.splitlines()
    if len(lines) < 2:
        raise FormatError("configuration file needs a header line and a body line")
    head = lines[0].split()
    if len(head) != 3 or head[0] != MAGIC:
        raise FormatError(f"bad header {lines[0]!r}, expected '{MAGIC} d n'")
    try:
        spec = TorusSpec(int(head[1]), int(head[2]))
    except ValueError as exc:
        raise FormatError(f"bad header {lines[0]!r}: {exc}") from None
    body = lines[1].strip()
    if len(body) != spec.edge_count or set(body) - {"0", "1"}:
        raise FormatError(f"body must be {spec.edge_count} characters over {{0,1}}, got {len(body)}")
    meta = {}
    for line in lines[2:]:
        if not line.strip():
            continue
        if not line.startswith("#"):
            raise FormatError(f"unexpected trailing line {line!r}")
        key, sep, value = line[1:].strip().partition("=")
        if sep:
            meta[key.strip()] = value.strip()
    bits = np.frombuffer(body.encode("ascii"), dtype=np.uint8) - ord("0")
    return Configuration(spec, bits), meta


def write_configuration(path, omega: Configuration, comments: dict | None = None):
    Path(path).write_text(format_configuration(omega, comments))


def read_configuration(path) -> tuple[Configuration, dict]:
    return parse_configuration(Path(path).read_text())


# ---------------------------------------------------------------------------
# key=value files


def _key_values(text: str, source: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        if key in out:
            raise FormatError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


CONSTANT_KEYS = tuple(f.name for f in fields(EventConstants))


def parse_constants(text: str, source: str = "<constants>") -> EventConstants:
    kv = _key_values(text, source)
    unknown = sorted(set(kv) - set(CONSTANT_KEYS))
    if unknown:
        raise FormatError(f"{source}: unknown constant keys {unknown}")
    try:
        values = {k: float(v) for k, v in kv.items()}
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None
    return EventConstants(**values)


def format_constants(k: EventConstants) -> str:
    return "".join(f"{name}={getattr(k, name)!r}\n" for name in CONSTANT_KEYS)


def read_constants(path) -> EventConstants:
    return parse_constants(Path(path).read_text(), str(path))


def default_constants() -> EventConstants:
    text = resources.files("percheeger").joinpath("data/constants_d2_p07.txt").read_text()
    return parse_constants(text, "constants_d2_p07.txt")


PLAN_REQUIRED = ("d", "n_list", "p", "samples", "master_seed")
PLAN_OPTIONAL = ("solver_mode", "record_gradients", "constants")


def _parse_bool(value: str, key: str) -> bool:
    low = value.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise FormatError(f"malformed value for {key}: {value!r}")


def parse_plan_text(text: str, source: str = "<plan>", base_dir: Path | None = None) -> ExperimentPlan:
    """Plan keys: d, n_list, p, samples, master_seed; optional solver_mode,
    record_gradients, constants (a constants file path) or inline c1..C_claim."""
    kv = _key_values(text, source)
    unknown = sorted(set(kv) - set(PLAN_REQUIRED) - set(PLAN_OPTIONAL) - set(CONSTANT_KEYS))
    if unknown:
        raise FormatError(f"{source}: unknown plan keys {unknown}")
    missing = [k for k in PLAN_REQUIRED if k not in kv]
    if missing:
        raise FormatError(f"{source}: missing required key {missing[0]!r}")
    try:
        d = int(kv["d"])
        n_list = tuple(int(x) for x in kv["n_list"].replace(",", " ").split())
        p = float(kv["p"])
        samples = int(kv["samples"])
        master_seed = int(kv["master_seed"], 0)
    except ValueError as exc:
        raise FormatError(f"{source}: malformed value: {exc}") from None
    mode = kv.get("solver_mode", "exact")
    if mode not in SOLVER_MODES:
        raise FormatError(f"{source}: solver_mode must be one of {SOLVER_MODES}, got {mode!r}")
    record = _parse_bool(kv.get("record_gradients", "false"), "record_gradients")
    if "constants" in kv:
        if any(k in kv for k in CONSTANT_KEYS):
            raise FormatError(f"{source}: give either a constants file or inline constants, not both")
        path = Path(kv["constants"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        constants = read_constants(path)
    else:
        inline = "".join(f"{k}={kv[k]}\n" for k in CONSTANT_KEYS if k in kv)
        constants = parse_constants(inline, source)
    try:
        return ExperimentPlan(d, n_list, p, samples, master_seed, constants, mode, record)
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None


def parse_plan(path) -> ExperimentPlan:
    path = Path(path)
    return parse_plan_text(path.read_text(), str(path), path.parent)


# ---------------------------------------------------------------------------
# JSON records


def _phi_fields(phi) -> dict:
    if phi is None:
        return {"phi_num": None, "phi_den": None, "phi_real": None}
    r = phi.reduced()
    return {"phi_num": r.num, "phi_den": r.den, "phi_real": r.num / r.den}


def _meta_value(meta: dict, key: str, cast):
    try:
        return cast(meta[key])
    except (KeyError, ValueError):
        return None


def solve_record(omega: Configuration, result: CheegerResult, giant_size: int, meta: dict, timing_ms: float) -> dict:
    rec = {
        "kind": "solve",
        "d": omega.spec.d,
        "n": omega.spec.n,
        "p": _meta_value(meta, "p", float),
        "seed": _meta_value(meta, "seed", int),
        **_phi_fields(result.phi),
        "giant_size": giant_size,
        "max_minimizer_size": result.max_minimizer_size,
        "method": result.method,
        "optimal": result.optimal,
        "witness": list(result.witness.vertices),
        "events": None,
        "timing_ms": timing_ms,
    }
    return rec


def _events_dict(report: EventReport | None):
    if report is None:
        return None
    return {k: v for k, v in report.as_dict().items() if k != "details"} | {"details": report.details}


def sample_record(plan: ExperimentPlan, rec: SampleRecord) -> dict:
    out = {
        "kind": "sample",
        "d": plan.d,
        "n": rec.n,
        "p": plan.p,
        "seed": rec.seed,
        "sample_index": rec.index,
        **_phi_fields(rec.phi),
        "giant_size": rec.giant_size,
        "max_minimizer_size": rec.max_minimizer_size,
        "method": plan.solver_mode,
        "events": _events_dict(rec.events),
        "timing_ms": rec.timing_ms,
    }
    if rec.grad_num is not None:
        out["gradients"] = [
            None if b == 0 else [int(a), int(b)] for a, b in zip(rec.grad_num, rec.grad_den)
        ]
        out["cases"] = [int(c) for c in rec.cases]
    return out


def dumps_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False)


def strip_timing(record: dict) -> dict:
    return {k: v for k, v in record.items() if k not in TIMING_KEYS}


def load_schema() -> dict:
    return json.loads(resources.files("percheeger").joinpath("data/result_record.schema.json").read_text())


SUMMARY_COLUMNS = (
    "n", "samples", "censored", "mean_phi", "var_phi", "n_mean", "scaled_var",
    "mean_ci_lo", "mean_ci_hi", "scaled_var_ci_lo", "scaled_var_ci_hi",
    "n_phi_min", "n_phi_max", "freq_h1", "freq_h2", "freq_h3", "freq_h4", "freq_h5",
    "freq_g", "freq_h_all", "sup_grad", "sup_scaled_grad", "talagrand_sum",
)


def write_summary_csv(path, stats: dict[int, SummaryStats]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for s in stats.values():
            ev = s.event_frequencies
            writer.writerow([
                s.n, s.samples, s.censored, repr(s.mean_phi), repr(s.var_phi), repr(s.n_mean), repr(s.scaled_var),
                repr(s.mean_ci[0]), repr(s.mean_ci[1]), repr(s.scaled_var_ci[0]), repr(s.scaled_var_ci[1]),
                repr(s.n_phi_min), repr(s.n_phi_max),
                *[repr(ev[k]) if k in ev else "" for k in ("h1", "h2", "h3", "h4", "h5", "g", "h_all")],
                "" if s.sup_grad is None else repr(s.sup_grad),
                "" if s.sup_scaled_grad is None else repr(s.sup_scaled_grad),
                "" if s.talagrand_sum is None else repr(s.talagrand_sum),
            ])


def jsonable(obj):
    """Recursively convert numpy scalars, tuples and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj
