"""On-disk cache of realizable sets.

A cache file is a JSON document::

    {"format": "ergm-exact-realizable", "version": 2,
     "k": 3, "kinds": ["edges", "mean_degree"], "labels": ["edges", "mean_degree"],
     "total": 8, "denominators": [1, 3],
     "rows": [[[0, 0], 1], [[1, 2], 3], [[2, 4], 3], [[3, 6], 1]]}

Each row holds integer numerators over the per-column denominators, so the
file is exact and the lexicographic order can be checked on integers.
Files are keyed by ``(k, labels)``.
"""
from __future__ import annotations

import functools
import json
import logging
import operator
import os
import re
from fractions import Fraction
from math import lcm
from pathlib import Path

from .errors import CacheError, InvalidInput
from .graphspace import RealizableSet, StatisticSpec, as_specs, num_slots, realizable_set

log = logging.getLogger(__name__)

FORMAT = "ergm-exact-realizable"
VERSION = 2
ENV_DIR = "ERGM_EXACT_CACHE_DIR"


def cache_file(cache_dir, k: int, specs) -> Path:
    labels = [s.label for s in as_specs(specs)]
    stem = "-".join(re.sub(r"[^A-Za-z0-9_]+", "_", lb) for lb in labels)
    return Path(cache_dir) / f"k{k}-{stem}.json"


def write_cache(rs: RealizableSet, path) -> None:
    dens = [lcm(*(p[c].denominator for p in rs.points)) for c in range(rs.n)]
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "k": rs.k,
        "kinds": [s.kind for s in rs.specs],
        "labels": list(rs.labels),
        "total": rs.total,
        "denominators": dens,
        "rows": [[[int(x * d) for x, d in zip(p, dens)], m] for p, m in zip(rs.points, rs.multiplicities)],
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, separators=(",", ":")) + "\n")
    os.replace(tmp, path)


def read_cache(path, k: int | None = None, specs=None) -> RealizableSet:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise CacheError(f"unreadable cache {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise CacheError(f"{path} is not a version {VERSION} realizable-set cache")
    try:
        ck = doc["k"]
        cspecs = tuple(StatisticSpec(kd, lb) for kd, lb in zip(doc["kinds"], doc["labels"], strict=True))
        if k is not None and ck != k:
            raise CacheError(f"cache holds k={ck}, wanted k={k}")
        if specs is not None and cspecs != as_specs(specs):
            raise CacheError("cache statistics do not match the request")
        dens = doc["denominators"]
        rows = doc["rows"]
        nums = [tuple(row[0]) for row in rows]
        mults = [row[1] for row in rows]
        total = doc["total"]
        if {len(row) for row in rows} != {2}:
            raise CacheError("malformed cache row")
    except (KeyError, TypeError, ValueError, InvalidInput) as exc:
        if isinstance(exc, CacheError):
            raise
        raise CacheError(f"corrupt cache {path}: {exc}") from None
    n = len(cspecs)
    # type(x) is int also rejects bools
    if len(dens) != n or {type(d) for d in dens} != {int} or min(dens) <= 0:
        raise CacheError("malformed denominators")
    if not nums or {len(row) for row in nums} != {n}:
        raise CacheError("malformed cache row")
    if {type(x) for row in nums for x in row} != {int} or {type(m) for m in mults} != {int} or min(mults) <= 0:
        raise CacheError("malformed cache row")
    if type(ck) is not int or type(total) is not int:
        raise CacheError("malformed k or total")
    expected = 1 << num_slots(ck)
    if sum(mults) != expected or total != expected:
        raise CacheError(f"multiplicities sum to {sum(mults)}, expected {expected}")
    # positive per-column scaling preserves lexicographic order
    if any(map(operator.ge, nums, nums[1:])):
        raise CacheError("cache points are not strictly increasing")
    columns = []
    for c, d in enumerate(dens):
        col = [row[c] for row in nums]
        exact = {v: _fraction(v, d) for v in set(col)}
        columns.append(map(exact.__getitem__, col))
    return RealizableSet(ck, cspecs, tuple(zip(*columns)), tuple(mults), total)


@functools.lru_cache(maxsize=4096)
def _fraction(n: int, d: int) -> Fraction:
    return Fraction(n, d)


def cache_roundtrip(rs: RealizableSet, path) -> RealizableSet:
    write_cache(rs, path)
    return read_cache(path, rs.k, rs.specs)


def load_or_build(k: int, specs, cache_dir=None) -> tuple[RealizableSet, str]:
    """Realizable set from the cache when valid, else enumerated (and cached)."""
    specs = as_specs(specs)
    cache_dir = cache_dir or os.environ.get(ENV_DIR)
    if not cache_dir:
        return realizable_set(k, specs), "enumerated"
    path = cache_file(cache_dir, k, specs)
    if path.exists():
        try:
            return read_cache(path, k, specs), "cache"
        except CacheError as exc:
            log.warning("ignoring cache: %s", exc)
    rs = realizable_set(k, specs)
    try:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        write_cache(rs, path)
    except OSError as exc:
        log.warning("could not write cache %s: %s", path, exc)
    return rs, "enumerated"
