"""Independent reference implementations used as test oracles.

Nothing here imports the solver layer; graph facts are recomputed from the
raw bit string with plain Python (BFS, itertools) so agreement is meaningful.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from percheeger.percolation import Configuration, sample_configuration
from percheeger.torus import TorusSpec

M64 = (1 << 64) - 1

# numba compiles lazily, so first calls are slow; timing is not under test
settings.register_profile("default", deadline=None)
settings.load_profile("default")


def ref_splitmix_bits(d, n, p, seed):
    out = []
    for i in range(d * n ** d):
        z = (seed + (i + 1) * 0x9E3779B97F4A7C15) & M64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
        z ^= z >> 31
        out.append(1 if Fraction(z >> 11, 1 << 53) < Fraction(p) else 0)
    return out


def ref_edges(d, n):
    """(u, v) for each edge id, computed from coordinates directly."""
    edges = []
    for v in range(n ** d):
        coords = [(v // n ** i) % n for i in range(d)]
        for k in range(d):
            c = list(coords)
            c[k] = (c[k] + 1) % n
            edges.append((v, sum(x * n ** i for i, x in enumerate(c))))
    return edges


def ref_adjacency(omega):
    d, n = omega.spec.d, omega.spec.n
    adj = {v: set() for v in range(n ** d)}
    for e, (u, v) in enumerate(ref_edges(d, n)):
        if omega.bits[e]:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def ref_giant(omega):
    adj = ref_adjacency(omega)
    seen, best = set(), None
    for s in sorted(adj):
        if s in seen:
            continue
        comp, stack = {s}, [s]
        while stack:
            for w in adj[stack.pop()]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        if best is None or len(comp) > len(best):
            best = comp
    return frozenset(best)


def ref_boundary(A, omega):
    A = set(A)
    return sum(
        1 for e, (u, v) in enumerate(ref_edges(omega.spec.d, omega.spec.n))
        if omega.bits[e] and ((u in A) != (v in A))
    )


def ref_phi(omega):
    """(phi, largest minimizer size, lexicographically smallest such set) by enumeration."""
    C = sorted(ref_giant(omega))
    edges = [(u, v) for e, (u, v) in enumerate(ref_edges(omega.spec.d, omega.spec.n)) if omega.bits[e]]
    best, top, wit = None, 0, None
    for k in range(1, len(C) // 2 + 1):
        for A in itertools.combinations(C, k):
            s = set(A)
            b = sum(1 for u, v in edges if (u in s) != (v in s))
            r = Fraction(b, k)
            if best is None or r < best:
                best, top, wit = r, k, A
            elif r == best and k > top:
                top, wit = k, A
    return best, top, wit


def ref_iso(omega, eps):
    C = sorted(ref_giant(omega))
    g = (eps - 1) / eps
    edges = [(u, v) for e, (u, v) in enumerate(ref_edges(omega.spec.d, omega.spec.n)) if omega.bits[e]]
    best = None
    for k in range(1, len(C) // 2 + 1):
        for A in itertools.combinations(C, k):
            s = set(A)
            b = sum(1 for u, v in edges if (u in s) != (v in s))
            val = b / k ** g
            best = val if best is None else min(best, val)
    return best


def small_giant_configs(count, seed, n_choices=(3, 4), p_choices=(0.5, 0.7, 0.9), max_size=14, min_size=2):
    """Sampled d=2 configurations whose giant component is small enough for enumeration."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.choice(n_choices))
        p = float(rng.choice(p_choices))
        omega = sample_configuration(TorusSpec(2, n), p, int(rng.integers(0, 2**63)))
        if min_size <= len(ref_giant(omega)) <= max_size:
            out.append(omega)
    return out


@pytest.fixture(scope="session")
def spec44():
    return TorusSpec(2, 4)


@pytest.fixture(scope="session")
def full44(spec44):
    return Configuration.all_open(spec44)


def bridged_pair_instance(rng, omega, max_part=6):
    """Disjoint A, B inside the giant with exactly one open edge between them, or None."""
    C = ref_giant(omega)
    adj = ref_adjacency(omega)
    inner = [(u, v) for u, v in _open_pairs(omega) if u in C and v in C]
    if not inner:
        return None
    x, y = inner[rng.integers(len(inner))]

    def grow(seed, banned, size):
        part = {seed}
        while len(part) < size:
            frontier = sorted({w for u in part for w in adj[u]} - part - banned)
            if not frontier:
                break
            part.add(frontier[rng.integers(len(frontier))])
        return part

    A = grow(x, {y}, int(rng.integers(1, max_part + 1)))
    B = grow(y, A, int(rng.integers(1, max_part + 1)))
    between = sum(1 for u, v in _open_pairs(omega) if (u in A and v in B) or (u in B and v in A))
    return (A, B) if between == 1 else None


def _open_pairs(omega):
    return [uv for e, uv in enumerate(ref_edges(omega.spec.d, omega.spec.n)) if omega.bits[e]]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def criterion():
    def record(key, ok, detail):
        ACCEPTANCE_LINES[key] = f"{key}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[1].rstrip("abc"))):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
