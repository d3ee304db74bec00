"""Exhaustive enumeration of labeled undirected graphs and exact statistics.

A graph on ``k`` vertices is an integer bit mask over the ``k(k-1)/2`` edge
slots numbered by :func:`edge_index`.  Aggregation over the whole graph space
is done in fixed-size mask ranges with numpy; each range produces a partial
count table and tables merge by addition, so any partition of the mask range
gives the same :class:`RealizableSet`.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import CapacityExceeded, InvalidInput
from .exact import RationalVector

K_MAX = 8
KINDS = ("edges", "triangles", "two_stars", "mean_degree", "isolates", "max_degree")

# masks aggregated per numpy pass
CHUNK = 1 << 18


def num_slots(k: int) -> int:
    return k * (k - 1) // 2


def check_k(k: int) -> None:
    if not isinstance(k, int) or k < 2:
        raise InvalidInput(f"vertex count must be an integer >= 2, got {k!r}")
    if k > K_MAX:
        raise CapacityExceeded(f"k={k} exceeds K_MAX={K_MAX}")


def edge_index(i: int, j: int, k: int) -> int:
    if not (0 <= i < j < k):
        raise InvalidInput(f"need 0 <= i < j < k, got ({i}, {j}, {k})")
    return i * k - i * (i + 1) // 2 + (j - i - 1)


def slot_pairs(k: int) -> list[tuple[int, int]]:
    """Vertex pair of every edge slot, in slot order."""
    return list(combinations(range(k), 2))


@dataclass(frozen=True)
class EdgeMask:
    bits: int
    k: int

    def __post_init__(self):
        check_k(self.k)
        if self.bits < 0 or self.bits >> num_slots(self.k):
            raise InvalidInput(f"mask {self.bits:#x} has bits beyond slot {num_slots(self.k) - 1}")

    @classmethod
    def from_edges(cls, edges, k: int) -> "EdgeMask":
        bits = 0
        for i, j in edges:
            i, j = min(i, j), max(i, j)
            bits |= 1 << edge_index(i, j, k)
        return cls(bits, k)

    def has_edge(self, i: int, j: int) -> bool:
        i, j = min(i, j), max(i, j)
        return bool(self.bits >> edge_index(i, j, self.k) & 1)

    def degrees(self) -> list[int]:
        deg = [0] * self.k
        for e, (i, j) in enumerate(slot_pairs(self.k)):
            if self.bits >> e & 1:
                deg[i] += 1
                deg[j] += 1
        return deg


@dataclass(frozen=True)
class StatisticSpec:
    kind: str
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown statistic kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not self.label:
            object.__setattr__(self, "label", self.kind)


def as_specs(specs) -> tuple[StatisticSpec, ...]:
    out = tuple(s if isinstance(s, StatisticSpec) else StatisticSpec(s) for s in specs)
    if not out:
        raise InvalidInput("at least one statistic is required")
    return out


def enumerate_graphs(k: int) -> Iterator[EdgeMask]:
    check_k(k)
    for bits in range(1 << num_slots(k)):
        yield EdgeMask(bits, k)


def statistic_value(g: EdgeMask, s: StatisticSpec | str) -> Fraction:
    kind = s.kind if isinstance(s, StatisticSpec) else StatisticSpec(s).kind
    if kind == "edges":
        return Fraction(g.bits.bit_count())
    if kind == "triangles":
        return Fraction(sum(
            1 for a, b, c in combinations(range(g.k), 3)
            if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)
        ))
    if kind == "mean_degree":
        return Fraction(2 * g.bits.bit_count(), g.k)
    deg = g.degrees()
    if kind == "two_stars":
        return Fraction(sum(d * (d - 1) // 2 for d in deg))
    if kind == "isolates":
        return Fraction(sum(1 for d in deg if d == 0))
    return Fraction(max(deg))


def statistic_vector(g: EdgeMask, specs) -> RationalVector:
    return tuple(statistic_value(g, s) for s in as_specs(specs))


@dataclass(frozen=True)
class RealizableSet:
    """Distinct statistic points of the whole graph space, with multiplicities."""

    k: int
    specs: tuple[StatisticSpec, ...]
    points: tuple[RationalVector, ...]
    multiplicities: tuple[int, ...]
    total: int = field(default=0)

    def __post_init__(self):
        if len(self.points) != len(self.multiplicities):
            raise InvalidInput("points and multiplicities differ in length")
        if not self.total:
            object.__setattr__(self, "total", sum(self.multiplicities))

    @property
    def n(self) -> int:
        return len(self.specs)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.specs)

    @cached_property
    def float_offsets(self) -> np.ndarray:
        """Points minus the first point, as floats (differences are exact first)."""
        p0 = self.points[0]
        return np.array([[float(a - b) for a, b in zip(p, p0)] for p in self.points], dtype=float)

    @cached_property
    def log_multiplicities(self) -> np.ndarray:
        return np.log(np.array(self.multiplicities, dtype=float))

    def index_of(self, point) -> int | None:
        try:
            return self.points.index(tuple(point))
        except ValueError:
            return None


# --- vectorized aggregation -------------------------------------------------

def _columns(k: int, kinds: Sequence[str], masks: np.ndarray) -> list[np.ndarray]:
    """Integer numerators of each statistic for a block of masks."""
    pairs = slot_pairs(k)
    bits = [((masks >> e) & 1).astype(np.int16) for e in range(len(pairs))]
    need_deg = any(kd in ("two_stars", "isolates", "max_degree") for kd in kinds)
    edges = np.zeros(len(masks), dtype=np.int16)
    for b in bits:
        edges += b
    deg = None
    if need_deg:
        deg = [np.zeros(len(masks), dtype=np.int16) for _ in range(k)]
        for b, (i, j) in zip(bits, pairs):
            deg[i] += b
            deg[j] += b
    out = []
    for kind in kinds:
        if kind in ("edges", "mean_degree"):
            # mean_degree numerator over denominator k
            out.append(edges if kind == "edges" else 2 * edges)
        elif kind == "triangles":
            tri = np.zeros(len(masks), dtype=np.int16)
            for a, b, c in combinations(range(k), 3):
                tri += bits[edge_index(a, b, k)] & bits[edge_index(a, c, k)] & bits[edge_index(b, c, k)]
            out.append(tri)
        elif kind == "two_stars":
            out.append(sum(d * (d - 1) // 2 for d in deg))
        elif kind == "isolates":
            out.append(sum((d == 0).astype(np.int16) for d in deg))
        else:
            out.append(np.maximum.reduce(deg))
    return out


def _bounds(k: int, kind: str) -> int:
    """Exclusive upper bound of a statistic's integer numerator."""
    e = num_slots(k)
    return {
        "edges": e + 1,
        "mean_degree": 2 * e + 1,
        "triangles": math.comb(k, 3) + 1,
        "two_stars": k * math.comb(k - 1, 2) + 1,
        "isolates": k + 1,
        "max_degree": k,
    }[kind]


def partial_counts(k: int, specs, start: int, stop: int) -> Counter:
    """Count table {numerator tuple: graphs} for masks in [start, stop)."""
    check_k(k)
    kinds = [s.kind for s in as_specs(specs)]
    radices = [_bounds(k, kd) for kd in kinds]
    counts: Counter = Counter()
    for lo in range(start, stop, CHUNK):
        masks = np.arange(lo, min(stop, lo + CHUNK), dtype=np.int64)
        cols = _columns(k, kinds, masks)
        key = np.zeros(len(masks), dtype=np.int64)
        for col, rad in zip(cols, radices):
            key = key * rad + col
        uniq, cnt = np.unique(key, return_counts=True)
        for u, c in zip(uniq.tolist(), cnt.tolist()):
            counts[u] += c
    # decode mixed-radix keys
    decoded: Counter = Counter()
    for key, c in counts.items():
        nums = []
        for rad in reversed(radices):
            key, r = divmod(key, rad)
            nums.append(r)
        decoded[tuple(reversed(nums))] += c
    return decoded


def merge_counts(parts) -> Counter:
    total: Counter = Counter()
    for p in parts:
        total.update(p)
    return total


def _worker(args):
    return partial_counts(*args)


def realizable_set(k: int, specs, workers: int = 1, ranges: int | None = None) -> RealizableSet:
    """Aggregate the statistic image of all graphs on ``k`` vertices.

    ``ranges`` splits the mask space into that many disjoint intervals;
    ``workers > 1`` evaluates them in separate processes.
    """
    check_k(k)
    specs = as_specs(specs)
    total = 1 << num_slots(k)
    nparts = ranges or max(1, workers)
    step = -(-total // nparts)
    jobs = [(k, specs, lo, min(total, lo + step)) for lo in range(0, total, step)]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = merge_counts(pool.map(_worker, jobs))
    else:
        counts = merge_counts(partial_counts(*j) for j in jobs)
    return from_counts(k, specs, counts)


def from_counts(k: int, specs, counts: Mapping[tuple, int]) -> RealizableSet:
    specs = as_specs(specs)
    dens = [k if s.kind == "mean_degree" else 1 for s in specs]
    rows = sorted(
        (tuple(Fraction(x, d) for x, d in zip(key, dens)), c) for key, c in counts.items()
    )
    return RealizableSet(
        k=k,
        specs=specs,
        points=tuple(p for p, _ in rows),
        multiplicities=tuple(c for _, c in rows),
        total=sum(c for _, c in rows),
    )
