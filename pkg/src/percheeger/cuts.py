"""Edge boundaries, the Cheeger constant of the giant component, and I_eps.

Three solvers share one contract:

* ``cheeger_brute`` walks every subset (|C| <= 24);
* ``cheeger_exact`` is exact as well, either by a transfer-matrix sweep of
  the torus that yields the minimum boundary for every set size, or by
  branch and bound over connected vertex sets;
* ``cheeger_heuristic`` is a spectral sweep polished by local search and
  only ever gives an upper bound.

Ratios are kept as integer pairs and compared by cross-multiplication.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _kernels
from .percolation import Configuration, GiantComponent, giant_component
from .torus import geometry

BRUTE_LIMIT = 24
BNB_LIMIT = 64
TRANSFER_STATE_LIMIT = 1 << 14


class PhiUndefined(ValueError):
    """The giant component has fewer than two vertices, so no admissible set exists."""

    def __init__(self, size: int):
        super().__init__(f"phi undefined: giant component has size {size}")
        self.size = size


class GuardViolation(ValueError):
    """A solver was asked for an instance outside its size guard."""

    def __init__(self, what: str, value: int, limit: int):
        super().__init__(f"guard violation: {what} = {value} exceeds limit {limit}")
        self.what = what
        self.value = value
        self.limit = limit


class BudgetExceeded(RuntimeError):
    pass


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class ExactRatio:
    """``num / den`` kept unreduced (boundary count over set size)."""

    num: int
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise ValueError(f"denominator must be >= 1, got {self.den}")
        object.__setattr__(self, "num", int(self.num))
        object.__setattr__(self, "den", int(self.den))

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def reduced(self) -> "ExactRatio":
        f = self.as_fraction()
        return ExactRatio(f.numerator, f.denominator)

    def __float__(self) -> float:
        return self.num / self.den

    @staticmethod
    def _pair(other):
        if isinstance(other, ExactRatio):
            return other.num, other.den
        if isinstance(other, (int, np.integer)):
            return int(other), 1
        if isinstance(other, Fraction):
            return other.numerator, other.denominator
        return None

    def __eq__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        return self.num * pair[1] == pair[0] * self.den

    def __lt__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        return self.num * pair[1] < pair[0] * self.den

    def __hash__(self):
        return hash(self.as_fraction())

    def __sub__(self, other):
        return self.as_fraction() - _to_fraction(other)

    def __rsub__(self, other):
        return _to_fraction(other) - self.as_fraction()

    def __repr__(self):
        return f"ExactRatio({self.num}/{self.den})"


def _to_fraction(x) -> Fraction:
    if isinstance(x, ExactRatio):
        return x.as_fraction()
    return Fraction(x)


@dataclass(frozen=True)
class CutSet:
    vertices: tuple[int, ...]
    boundary: int

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def ratio(self) -> ExactRatio:
        return ExactRatio(self.boundary, self.size)


@dataclass(frozen=True)
class CheegerResult:
    phi: ExactRatio
    witness: CutSet
    max_minimizer_size: int
    method: str
    optimal: bool


@dataclass(frozen=True)
class IsoProfileResult:
    epsilon: float
    value: float
    witness: tuple[int, ...]


# ---------------------------------------------------------------------------
# boundaries


def open_boundary(A: Iterable[int], omega: Configuration) -> int:
    """Open torus edges with exactly one endpoint in ``A`` (no membership checks)."""
    _, ends = geometry(omega.spec)
    member = np.zeros(omega.spec.vertex_count, dtype=bool)
    member[np.fromiter(A, dtype=np.int64)] = True
    crossing = member[ends[:, 0]] != member[ends[:, 1]]
    return int(np.count_nonzero(crossing & (omega.bits == 1)))


def _as_vertex_list(A) -> list[int]:
    return sorted({int(v) for v in A})


def boundary_size(A, omega: Configuration, C: GiantComponent) -> int:
    verts = _as_vertex_list(A)
    outside = [v for v in verts if v not in C]
    if outside:
        raise ValueError(f"set is not contained in the giant component (e.g. vertex {outside[0]})")
    return open_boundary(verts, omega)


def psi(A, omega: Configuration, C: GiantComponent) -> ExactRatio:
    verts = _as_vertex_list(A)
    if not verts:
        raise ValueError("psi is undefined for the empty set")
    return ExactRatio(boundary_size(verts, omega, C), len(verts))


def epsilon_n(spec) -> float:
    """``d + 2d log log n / log n`` with natural logarithms."""
    n = spec.n
    if n < 3:
        raise ValueError(f"epsilon(n) needs n >= 3, got {n}")
    return spec.d + 2 * spec.d * math.log(math.log(n)) / math.log(n)


# ---------------------------------------------------------------------------
# the cluster as a small graph


@dataclass
class _Cluster:
    vertices: np.ndarray  # sorted vertex ids
    nbrs: list  # local adjacency lists
    deg: np.ndarray

    @property
    def size(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def half(self) -> int:
        return self.size // 2

    def masks(self) -> np.ndarray:
        if self.size > BNB_LIMIT:
            raise GuardViolation("cluster size for bitmask search", self.size, BNB_LIMIT)
        adj = np.zeros(self.size, dtype=np.uint64)
        for i, row in enumerate(self.nbrs):
            for j in row:
                adj[i] |= np.uint64(1) << np.uint64(j)
        return adj

    def to_vertices(self, local) -> tuple[int, ...]:
        return tuple(sorted(int(self.vertices[i]) for i in local))


def _mask_to_local(mask) -> list[int]:
    mask = int(mask)
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _cluster(omega: Configuration, C: GiantComponent) -> _Cluster:
    _, ends = geometry(omega.spec)
    local = np.full(omega.spec.vertex_count, -1, dtype=np.int64)
    local[C.vertices] = np.arange(C.size)
    open_e = ends[omega.bits == 1]
    inner = open_e[C.mask[open_e[:, 0]]]
    nbrs = [[] for _ in range(C.size)]
    for u, v in inner:
        a, b = local[u], local[v]
        nbrs[a].append(b)
        nbrs[b].append(a)
    nbrs = [sorted(r) for r in nbrs]
    deg = np.array([len(r) for r in nbrs], dtype=np.int64)
    return _Cluster(C.vertices, nbrs, deg)


def _resolve(omega: Configuration, C: GiantComponent | None) -> GiantComponent:
    if C is None:
        C = giant_component(omega)
    if C.size < 2:
        raise PhiUndefined(C.size)
    return C


# ---------------------------------------------------------------------------
# size-resolved boundary profiles


def _brute_profile(cl: _Cluster):
    if cl.size > BRUTE_LIMIT:
        raise GuardViolation("giant component size for brute force", cl.size, BRUTE_LIMIT)
    return _kernels.brute_profile(cl.masks(), cl.deg, cl.size, cl.half)


def _transfer_states(spec) -> int:
    return 1 << (spec.n ** (spec.d - 1))


def transfer_applicable(spec) -> bool:
    return spec.n ** (spec.d - 1) <= 62 and _transfer_states(spec) <= TRANSFER_STATE_LIMIT


def _transfer_profile(omega: Configuration, C: GiantComponent, forced=None) -> np.ndarray:
    coords, ends = geometry(omega.spec)
    status = np.where(C.mask, 2, 0).astype(np.int64)
    if forced:
        for v, lab in forced.items():
            status[v] = lab
    return _kernels.profile_dp(omega.spec.d, omega.spec.n, coords, ends, omega.bits, status, C.size // 2)


def _transfer_witness(omega: Configuration, C: GiantComponent, size: int, target: int) -> tuple[int, ...]:
    """Lexicographically smallest set of ``size`` vertices with boundary ``target``."""
    forced: dict[int, int] = {}
    chosen = []
    for v in C.vertices:
        v = int(v)
        if len(chosen) == size:
            forced[v] = 0
            continue
        forced[v] = 1
        if _transfer_profile(omega, C, forced)[size] == target:
            chosen.append(v)
        else:
            forced[v] = 0
    return tuple(chosen)


def boundary_profile(omega: Configuration, C: GiantComponent | None = None, engine: str = "auto") -> np.ndarray:
    """``profile[k]`` = least boundary over subsets of C of size k, ``k <= |C|//2``."""
    C = _resolve(omega, C)
    if engine == "auto":
        engine = "transfer" if transfer_applicable(omega.spec) else "brute"
    if engine == "brute":
        return _brute_profile(_cluster(omega, C))[0]
    if engine == "transfer":
        if not transfer_applicable(omega.spec):
            raise GuardViolation("transfer-matrix states", _transfer_states(omega.spec), TRANSFER_STATE_LIMIT)
        return _transfer_profile(omega, C)
    raise ValueError(f"unknown profile engine {engine!r}")


def _phi_from_profile(profile) -> tuple[ExactRatio, int]:
    best = None
    for k in range(1, len(profile)):
        b = int(profile[k])
        if b >= _kernels.INF:
            continue
        if best is None or b * best.den < best.num * k:
            best = ExactRatio(b, k)
    if best is None:
        raise PhiUndefined(1)
    top = max(k for k in range(1, len(profile)) if int(profile[k]) * best.den == best.num * k)
    return best, top


def _result(cl_or_none, phi_set: tuple[int, ...], boundary: int, top: int, method: str, optimal: bool):
    witness = CutSet(phi_set, boundary)
    phi = witness.ratio
    return CheegerResult(phi=phi, witness=witness, max_minimizer_size=top, method=method, optimal=optimal)


# ---------------------------------------------------------------------------
# solvers


def cheeger_brute(omega: Configuration, C: GiantComponent | None = None) -> CheegerResult:
    C = _resolve(omega, C)
    cl = _cluster(omega, C)
    best, witness = _brute_profile(cl)
    phi, top = _phi_from_profile(best)
    verts = cl.to_vertices(_mask_to_local(witness[top]))
    return _result(cl, verts, int(best[top]), top, "brute", True)


def _bnb_minimizers(cl: _Cluster, upper: ExactRatio, budget: int, cap: int = 1 << 16):
    adj = cl.masks()
    out = np.zeros(1, dtype=np.uint64)
    num, den, _, mask, _, nodes = _kernels.connected_search(
        adj, cl.deg, cl.size, cl.half, 0, upper.num, upper.den, 1.0, 0.0, budget, out)
    if nodes < 0:
        raise BudgetExceeded(f"branch and bound exceeded its budget of {budget} nodes")
    phi = ExactRatio(num, den)
    out = np.zeros(cap, dtype=np.uint64)
    _, _, _, _, count, nodes = _kernels.connected_search(
        adj, cl.deg, cl.size, cl.half, 1, phi.num, phi.den, 1.0, 0.0, budget, out)
    if nodes < 0:
        raise BudgetExceeded("branch and bound exceeded its budget while collecting minimizers")
    return phi, [int(m) for m in out[:count]], adj


def _pack_minimizers(masks: list[int], adj, limit: int) -> tuple[int, int]:
    """Largest union of pairwise separated minimizers with total size <= limit.

    Returns ``(size, mask)``; among largest unions the lexicographically
    smallest vertex set wins.
    """
    closed = []
    for m in masks:
        nb = m
        for i in _mask_to_local(m):
            nb |= int(adj[i])
        closed.append(nb)
    sizes = [bin(m).count("1") for m in masks]
    order = sorted(range(len(masks)), key=lambda i: -sizes[i])
    best = [0, 0]

    def lex_smaller(a, b):
        diff = a ^ b
        return bool(a & (diff & -diff))

    def rec(start, used_closed, union, total):
        if total > best[0] or (total == best[0] and total and lex_smaller(union, best[1])):
            best[0], best[1] = total, union
        for idx in range(start, len(order)):
            i = order[idx]
            if total + sizes[i] > limit or masks[i] & used_closed:
                continue
            rec(idx + 1, used_closed | closed[i], union | masks[i], total + sizes[i])

    rec(0, 0, 0, 0)
    return best[0], best[1]


def cheeger_exact(
    omega: Configuration,
    C: GiantComponent | None = None,
    engine: str = "auto",
    budget: int = 0,
) -> CheegerResult:
    """Exact Cheeger constant with the largest minimizer size.

    ``engine`` is ``"transfer"``, ``"bnb"`` or ``"auto"`` (transfer whenever
    the slice state space is small).  ``budget`` caps the B&B node count;
    zero means unlimited.
    """
    C = _resolve(omega, C)
    if engine == "auto":
        engine = "transfer" if transfer_applicable(omega.spec) else "bnb"
    if engine == "transfer":
        profile = boundary_profile(omega, C, "transfer")
        phi, top = _phi_from_profile(profile)
        verts = _transfer_witness(omega, C, top, int(profile[top]))
        return _result(None, verts, int(profile[top]), top, "exact", True)
    if engine != "bnb":
        raise ValueError(f"unknown exact engine {engine!r}")
    cl = _cluster(omega, C)
    if cl.size > BNB_LIMIT:
        raise GuardViolation("giant component size for branch and bound", cl.size, BNB_LIMIT)
    upper = cheeger_heuristic(omega, C).phi
    # the search only reports strict improvements, so start just above the bound
    start = ExactRatio(upper.num * 2 * cl.size + 1, upper.den * 2 * cl.size)
    phi, minimizers, adj = _bnb_minimizers(cl, start, budget)
    top, union = _pack_minimizers(minimizers, adj, cl.half)
    verts = cl.to_vertices(_mask_to_local(union))
    return _result(cl, verts, phi.num * top // phi.den, top, "exact", True)


def phi_and_top(omega: Configuration, C: GiantComponent | None = None, mode: str = "exact"):
    """``(phi, max_minimizer_size, profile or None)`` without a witness set."""
    C = _resolve(omega, C)
    if mode == "brute":
        profile = boundary_profile(omega, C, "brute")
    elif mode == "exact" and transfer_applicable(omega.spec):
        profile = boundary_profile(omega, C, "transfer")
    elif mode == "exact":
        res = cheeger_exact(omega, C, engine="bnb")
        return res.phi, res.max_minimizer_size, None
    elif mode == "heuristic":
        res = cheeger_heuristic(omega, C)
        return res.phi, res.max_minimizer_size, None
    else:
        raise ValueError(f"unknown solver mode {mode!r}")
    phi, top = _phi_from_profile(profile)
    return phi, top, profile


# ---------------------------------------------------------------------------
# heuristic upper bound


def _ratio_of(members: np.ndarray, cl: _Cluster) -> int:
    b = 0
    for i in np.flatnonzero(members):
        for j in cl.nbrs[i]:
            if not members[j]:
                b += 1
    return b


def _local_search(members: np.ndarray, b: int, cl: _Cluster, max_rounds: int):
    """Steepest-descent over add / remove / swap moves of boundary vertices."""
    size = int(members.sum())
    for _ in range(max_rounds):
        inside_cnt = np.array([sum(members[j] for j in cl.nbrs[i]) for i in range(cl.size)], dtype=np.int64)
        delta_add = cl.deg - 2 * inside_cnt  # change in boundary when toggling i
        best = (b, size)
        move = None
        ins = np.flatnonzero(members)
        outs = [i for i in np.flatnonzero(~members) if inside_cnt[i] > 0]
        touching = [i for i in ins if inside_cnt[i] < cl.deg[i]]

        def consider(nb, ns, mv):
            nonlocal best, move
            if ns < 1 or ns > cl.half:
                return
            if nb * best[1] < best[0] * ns:
                best, move = (nb, ns), mv

        for i in outs:
            consider(b + delta_add[i], size + 1, ((i, True),))
        for i in touching:
            consider(b - delta_add[i], size - 1, ((i, False),))
        for i in touching:
            for j in outs:
                adjacent = j in cl.nbrs[i]
                nb = b - delta_add[i] + delta_add[j] + (2 if adjacent else 0)
                consider(nb, size, ((i, False), (j, True)))
        if move is None:
            break
        for i, val in move:
            members[i] = val
        b, size = best
    return members, b


def cheeger_heuristic(
    omega: Configuration,
    C: GiantComponent | None = None,
    sweep_vectors: int = 6,
    max_rounds: int = 200,
) -> CheegerResult:
    """Spectral sweep cuts of the cluster Laplacian, then local search.

    ``sweep_vectors`` Laplacian eigenvectors (from the second smallest on) are
    swept; each threshold contributes its smaller side.  The best sweep set
    of every vector is improved by boundary-vertex exchange until no move
    lowers the ratio, and the best local minimum is returned.
    """
    C = _resolve(omega, C)
    cl = _cluster(omega, C)
    c = cl.size
    half = cl.half
    if c == 2:
        return _result(cl, (int(cl.vertices[0]),), 1, 1, "heuristic", False)
    lap = np.diag(cl.deg.astype(float))
    for i, row in enumerate(cl.nbrs):
        for j in row:
            lap[i, j] -= 1.0
    _, vecs = np.linalg.eigh(lap)

    starts = []  # best sweep set of every eigenvector: (boundary, size, members)
    for col in range(1, min(1 + sweep_vectors, c)):
        order = np.argsort(vecs[:, col], kind="stable")
        members = np.zeros(c, dtype=bool)
        b = 0
        best = None
        for k, v in enumerate(order[:-1], start=1):
            cnt = sum(members[j] for j in cl.nbrs[v])
            b += cl.deg[v] - 2 * cnt
            members[v] = True
            if k <= half:
                side, s = members.copy(), k
            else:
                side, s = ~members, c - k
            if best is None or b * best[1] < best[0] * s:
                best = (int(b), s, side)
        starts.append(best)
    found = None
    for b0, _, side in starts:
        members, b = _local_search(side.copy(), b0, cl, max_rounds)
        s = int(members.sum())
        if found is None or b * found[1] < found[0] * s:
            found = (b, s, members)
    b, _, members = found
    top = int(members.sum())
    verts = cl.to_vertices(np.flatnonzero(members))
    return _result(cl, verts, int(b), top, "heuristic", False)


# ---------------------------------------------------------------------------
# isoperimetric profile


def iso_profile(
    omega: Configuration,
    C: GiantComponent | None = None,
    epsilon: float = 2.0,
    mode: str = "exact",
) -> IsoProfileResult:
    """Minimum of ``|dA| / |A|^((eps-1)/eps)`` over admissible sets."""
    if not epsilon > 1:
        raise ValueError(f"epsilon must exceed 1, got {epsilon}")
    C = _resolve(omega, C)
    gamma = (epsilon - 1) / epsilon
    if mode == "brute" or (mode == "exact" and transfer_applicable(omega.spec)):
        profile = boundary_profile(omega, C, "brute" if mode == "brute" else "transfer")
        return _iso_from_profile(omega, C, epsilon, profile, mode)
    if mode != "exact":
        raise ValueError(f"unknown solver mode {mode!r}")
    cl = _cluster(omega, C)
    if cl.size > BNB_LIMIT:
        raise GuardViolation("giant component size for branch and bound", cl.size, BNB_LIMIT)
    out = np.zeros(1, dtype=np.uint64)
    _, _, val, mask, _, nodes = _kernels.connected_search(
        cl.masks(), cl.deg, cl.size, cl.half, 2, 0, 1, gamma, math.inf, 0, out)
    return IsoProfileResult(epsilon, float(val), cl.to_vertices(_mask_to_local(mask)))


def iso_value_from_profile(profile, epsilon: float) -> tuple[float, int]:
    gamma = (epsilon - 1) / epsilon
    best, arg = math.inf, 0
    for k in range(1, len(profile)):
        b = int(profile[k])
        if b >= _kernels.INF:
            continue
        val = b / k ** gamma
        if val < best:
            best, arg = val, k
    return best, arg


def _iso_from_profile(omega, C, epsilon, profile, mode) -> IsoProfileResult:
    value, k = iso_value_from_profile(profile, epsilon)
    if mode == "brute":
        cl = _cluster(omega, C)
        _, witness = _brute_profile(cl)
        verts = cl.to_vertices(_mask_to_local(witness[k]))
    else:
        verts = _transfer_witness(omega, C, k, int(profile[k]))
    return IsoProfileResult(epsilon, value, verts)
