"""Bernoulli bond percolation on the torus and its giant component."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .torus import TorusSpec, geometry

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1


def splitmix64(seed: int, i: int) -> int:
    """Output ``i`` (0-based) of the SplitMix64 stream started at ``seed``."""
    z = (seed + (i + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64_uniforms(seed: int, count: int) -> np.ndarray:
    """Doubles ``(z_i >> 11) * 2**-53`` for the first ``count`` stream outputs."""
    i = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + i * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True, eq=False)
class Configuration:
    """One open/closed bit per torus edge, in canonical edge order."""

    spec: TorusSpec
    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.shape[0] != self.spec.edge_count:
            raise ValueError(f"expected {self.spec.edge_count} bits, got shape {bits.shape}")
        if bits.size and bits.max() > 1:
            raise ValueError("bits must be 0 or 1")
        if bits is self.bits:
            bits = bits.copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.spec, self.bits.tobytes()))

    def __getitem__(self, e: int) -> int:
        return int(self.bits[e])

    @classmethod
    def from_open_edges(cls, spec: TorusSpec, edges) -> "Configuration":
        bits = np.zeros(spec.edge_count, dtype=np.uint8)
        bits[list(edges)] = 1
        return cls(spec, bits)

    @classmethod
    def all_open(cls, spec: TorusSpec) -> "Configuration":
        return cls(spec, np.ones(spec.edge_count, dtype=np.uint8))

    @classmethod
    def all_closed(cls, spec: TorusSpec) -> "Configuration":
        return cls(spec, np.zeros(spec.edge_count, dtype=np.uint8))

    @property
    def open_edges(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True)
class ClusterDecomposition:
    labels: np.ndarray
    sizes: dict[int, int]

    def cluster(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


@dataclass(frozen=True, eq=False)
class GiantComponent:
    """Vertex set of the largest open cluster, sorted by vertex id."""

    vertices: np.ndarray
    mask: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.vertices.shape[0])

    def __contains__(self, v) -> bool:
        return bool(self.mask[int(v)])

    def __eq__(self, other):
        if not isinstance(other, GiantComponent):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def as_set(self) -> frozenset[int]:
        return frozenset(int(v) for v in self.vertices)


def sample_configuration(spec: TorusSpec, p: float, seed: int) -> Configuration:
    """Edge ``i`` is open iff the ``i``-th SplitMix64 uniform is below ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    u = splitmix64_uniforms(int(seed), spec.edge_count)
    return Configuration(spec, (u < p).astype(np.uint8))


def _labels(omega: Configuration) -> np.ndarray:
    _, ends = geometry(omega.spec)
    return _kernels.cluster_labels(omega.spec.vertex_count, ends, omega.bits)


def cluster_decomposition(omega: Configuration) -> ClusterDecomposition:
    """Connected components of the open subgraph; labels are the smallest member id."""
    labels = _labels(omega)
    ids, counts = np.unique(labels, return_counts=True)
    labels.flags.writeable = False
    return ClusterDecomposition(labels, {int(i): int(c) for i, c in zip(ids, counts)})


def _giant_from_labels(labels: np.ndarray) -> GiantComponent:
    g, _ = _kernels.giant_label(labels)
    mask = labels == g
    vertices = np.flatnonzero(mask)
    vertices.flags.writeable = False
    mask.flags.writeable = False
    return GiantComponent(vertices, mask)


def giant_component(omega: Configuration) -> GiantComponent:
    return _giant_from_labels(_labels(omega))


def flip_giant_table(omega: Configuration, giant: GiantComponent | None = None):
    """Per-edge ``(|C(omega^e)|, |C(omega) symdiff C(omega^e)|)`` arrays."""
    if giant is None:
        giant = giant_component(omega)
    _, ends = geometry(omega.spec)
    return _kernels.flip_giants(omega.spec.vertex_count, ends, omega.bits, giant.mask)


def symmetric_difference_size(omega: Configuration, e: int) -> int:
    from .flips import flip

    a = giant_component(omega).mask
    b = giant_component(flip(omega, e)).mask
    return int(np.count_nonzero(a != b))
