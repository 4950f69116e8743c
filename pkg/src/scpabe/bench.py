"""Timing and size measurements for the scheme's core operations.

Two families of rows come out of a run:

* ``scale-<n>`` rows time encrypt/keygen/decrypt on single-layer
  lattices whose policy has exactly ``n`` attributes, so the ciphertext
  has exactly ``n`` leaves.  Plotting time against leaf count shows how
  close each operation is to linear cost.
* ``fixture-<name>`` rows measure the canonical overlapping lattices
  and record, next to the shared-tree leaf count, the total attribute
  count a per-layer encryption would have used — the size the shared
  tree saves.

Results are emitted as a comma-separated table with a header row.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import abe
from .errors import ValidationError
from .fixtures import overlap_fixtures
from .lattice import PolicyLattice, layer_coords, validate_lattice
from .pairing import BilinearGroup
from .tree import build_tree

CSV_HEADER = "case,leaf_count,naive_leaf_count,encrypt_ms,keygen_ms,decrypt_ms"


@dataclass(frozen=True)
class BenchRow:
    case: str
    leaf_count: int
    naive_leaf_count: int
    encrypt_ms: float
    keygen_ms: float
    decrypt_ms: float

    def to_csv(self) -> str:
        return (
            f"{self.case},{self.leaf_count},{self.naive_leaf_count},"
            f"{self.encrypt_ms:.3f},{self.keygen_ms:.3f},{self.decrypt_ms:.3f}"
        )


def scaling_lattice(n: int) -> PolicyLattice:
    """A single-layer lattice whose only policy has exactly ``n`` attributes."""
    if n < 1:
        raise ValidationError("scaling lattices need at least one attribute")
    policies = {(1, 1): frozenset(f"attr-{i:03d}" for i in range(n))}
    lat = PolicyLattice((1, 1), policies)
    validate_lattice(lat)
    return lat


def _measure_once(group: BilinearGroup, lat: PolicyLattice, rng) -> tuple[float, float, float]:
    pk, mk = abe.setup(group, rng)
    messages = {c: group.random_g1(rng) for c in layer_coords(lat.dims)}
    all_attrs = frozenset().union(*lat.policies.values())

    t0 = time.perf_counter()
    ct = abe.encrypt(pk, lat, messages, rng)
    t1 = time.perf_counter()
    uk = abe.keygen(pk, mk, lat.dims, all_attrs, rng)
    t2 = time.perf_counter()
    out = abe.decrypt(pk, uk, ct)
    t3 = time.perf_counter()
    assert out == messages, "benchmark round trip failed"
    return (t1 - t0) * 1e3, (t2 - t1) * 1e3, (t3 - t2) * 1e3


def measure(group: BilinearGroup, lat: PolicyLattice, rng, repeat: int = 1) -> tuple[float, float, float]:
    """Median encrypt/keygen/decrypt wall time for one lattice, in ms."""
    if repeat < 1:
        raise ValidationError("repeat count must be at least 1")
    samples = [_measure_once(group, lat, rng) for _ in range(repeat)]
    med = lambda xs: float(np.median(xs))
    return (
        med([s[0] for s in samples]),
        med([s[1] for s in samples]),
        med([s[2] for s in samples]),
    )


def naive_leaf_count(lat: PolicyLattice) -> int:
    """Leaves a per-layer encryption would spend: one tree per policy."""
    return sum(len(p) for p in lat.policies.values())


def run_bench(group: BilinearGroup, counts, rng, repeat: int = 1) -> list[BenchRow]:
    """Time the scaling family at each leaf count, then the fixtures."""
    counts = list(counts)
    if not counts:
        raise ValidationError("bench needs at least one leaf count")
    rows = []
    for n in counts:
        lat = scaling_lattice(n)
        leaf = build_tree(lat).leaf_count
        enc, key, dec = measure(group, lat, rng, repeat)
        rows.append(BenchRow(f"scale-{n}", leaf, naive_leaf_count(lat), enc, key, dec))
    for name, lat in overlap_fixtures():
        leaf = build_tree(lat).leaf_count
        enc, key, dec = measure(group, lat, rng, repeat)
        rows.append(BenchRow(f"fixture-{name}", leaf, naive_leaf_count(lat), enc, key, dec))
    return rows


def rows_to_csv(rows) -> str:
    return "\n".join([CSV_HEADER] + [row.to_csv() for row in rows]) + "\n"


def linear_fit_r2(xs, ys) -> float:
    """Coefficient of determination for the best-fit line through (xs, ys)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2:
        raise ValidationError("need at least two points to fit a line")
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    total = y - y.mean()
    denom = float(total @ total)
    if denom == 0.0:
        return 1.0
    return 1.0 - float(residuals @ residuals) / denom
