"""Geometry and canonical indexing of the discrete torus Z^d / nZ^d.

Vertices are numbered little-endian mixed radix, ``index = sum_i x_i n^i``.
Edge ``v*d + k`` joins ``v`` to ``v + unit_k (mod n)``; every torus edge has
exactly one such encoding as long as ``n >= 3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class TorusSpec:
    d: int
    n: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got d={self.d}")
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"side length must be >= 3 (simple graph), got n={self.n}")

    @property
    def vertex_count(self) -> int:
        return self.n ** self.d

    @property
    def edge_count(self) -> int:
        return self.d * self.n ** self.d


def _check_vertex(v: int, spec: TorusSpec) -> int:
    v = int(v)
    if not 0 <= v < spec.vertex_count:
        raise IndexError(f"vertex {v} out of range [0, {spec.vertex_count})")
    return v


def vertex_index(coords: Sequence[int], spec: TorusSpec) -> int:
    if len(coords) != spec.d:
        raise ValueError(f"expected {spec.d} coordinates, got {len(coords)}")
    index = 0
    for i, x in enumerate(coords):
        if not 0 <= x < spec.n:
            raise ValueError(f"coordinate {i} = {x} out of range [0, {spec.n})")
        index += int(x) * spec.n ** i
    return index


def vertex_coords(v: int, spec: TorusSpec) -> tuple[int, ...]:
    v = _check_vertex(v, spec)
    out = []
    for _ in range(spec.d):
        v, x = divmod(v, spec.n)
        out.append(x)
    return tuple(out)


def shift(v: int, k: int, step: int, spec: TorusSpec) -> int:
    """Vertex reached from ``v`` by ``step`` unit moves along axis ``k``."""
    x = list(vertex_coords(v, spec))
    x[k] = (x[k] + step) % spec.n
    return vertex_index(x, spec)


def edge_index(v: int, k: int, spec: TorusSpec) -> int:
    _check_vertex(v, spec)
    if not 0 <= k < spec.d:
        raise ValueError(f"direction {k} out of range [0, {spec.d})")
    return int(v) * spec.d + k


def edge_endpoints(e: int, spec: TorusSpec) -> tuple[int, int, int]:
    """Return ``(v, v + unit_k, k)`` for edge id ``e``."""
    e = int(e)
    if not 0 <= e < spec.edge_count:
        raise IndexError(f"edge {e} out of range [0, {spec.edge_count})")
    v, k = divmod(e, spec.d)
    return v, shift(v, k, 1, spec), k


def incident_edges(v: int, spec: TorusSpec) -> list[int]:
    """The ``2d`` edges touching ``v``: outgoing ones first, then incoming."""
    v = _check_vertex(v, spec)
    out = [v * spec.d + k for k in range(spec.d)]
    out += [shift(v, k, -1, spec) * spec.d + k for k in range(spec.d)]
    return out


def translate(v: int, t: Sequence[int], spec: TorusSpec) -> int:
    x = vertex_coords(v, spec)
    return vertex_index([(a + b) % spec.n for a, b in zip(x, t)], spec)


@lru_cache(maxsize=64)
def geometry(spec: TorusSpec) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised tables ``(coords[V, d], endpoints[E, 2])``, read-only."""
    V = spec.vertex_count
    idx = np.arange(V, dtype=np.int64)
    coords = np.empty((V, spec.d), dtype=np.int64)
    rem = idx.copy()
    for i in range(spec.d):
        coords[:, i] = rem % spec.n
        rem //= spec.n
    powers = spec.n ** np.arange(spec.d, dtype=np.int64)
    ends = np.empty((spec.edge_count, 2), dtype=np.int64)
    for k in range(spec.d):
        moved = coords.copy()
        moved[:, k] = (moved[:, k] + 1) % spec.n
        ends[k::spec.d, 0] = idx
        ends[k::spec.d, 1] = moved @ powers
    coords.flags.writeable = False
    ends.flags.writeable = False
    return coords, ends


def translate_edges(spec: TorusSpec, t: Sequence[int]) -> np.ndarray:
    """Permutation ``perm`` with ``perm[e]`` the image of edge ``e`` under ``v -> v + t``."""
    coords, _ = geometry(spec)
    powers = spec.n ** np.arange(spec.d, dtype=np.int64)
    moved = (coords + np.asarray(t, dtype=np.int64)) % spec.n
    image = moved @ powers
    perm = np.empty(spec.edge_count, dtype=np.int64)
    for k in range(spec.d):
        perm[k::spec.d] = image * spec.d + k
    return perm
