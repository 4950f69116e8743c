"""Canonical demonstration lattices.

These structures are shared by the command-line tooling, the benchmark
fixtures, and the test suite, so every consumer exercises the same
shapes.  ``worked_2x3`` is the standard two-dimensional example — a
quality dimension crossed with a subscription-tier dimension — whose
group partition and referee relations the test suite checks verbatim.
"""

from __future__ import annotations

import random

from .lattice import PolicyLattice, random_monotone_lattice, validate_lattice


def worked_2x3() -> PolicyLattice:
    """A 2-by-3 lattice of media grades with deliberately overlapping policies.

    The first dimension steps up video quality (adds ``hd``); the second
    steps through subscription tiers.  Neighbouring layers share most of
    their attributes, which is what makes the shared-tree ciphertext
    materially smaller than sealing each layer's policy separately.
    """
    policies = {
        (1, 1): {"subscriber"},
        (1, 2): {"subscriber", "bronze"},
        (1, 3): {"subscriber", "bronze", "silver"},
        (2, 1): {"subscriber", "hd"},
        (2, 2): {"subscriber", "hd", "bronze", "gold"},
        (2, 3): {"subscriber", "hd", "bronze", "silver", "gold", "platinum"},
    }
    lat = PolicyLattice((2, 3), {c: frozenset(p) for c, p in policies.items()})
    validate_lattice(lat)
    return lat


def split_base_2x1() -> PolicyLattice:
    """A minimal two-layer lattice whose base needs two attributes.

    Useful for studying what happens when the base policy's attributes
    are split across different users: neither holds enough to open even
    the base layer.
    """
    policies = {
        (1, 1): {"b0", "b1"},
        (2, 1): {"b0", "b1", "hd"},
    }
    lat = PolicyLattice((2, 1), {c: frozenset(p) for c, p in policies.items()})
    validate_lattice(lat)
    return lat


def overlap_fixtures() -> list[tuple[str, PolicyLattice]]:
    """Named lattices with overlapping per-layer policies.

    The higher-dimensional entries are generated from fixed seeds so
    the fixture set is stable across runs.
    """
    return [
        ("2x3", worked_2x3()),
        ("2x3x2", random_monotone_lattice((2, 3, 2), random.Random(20230201))),
        ("3x3x2", random_monotone_lattice((3, 3, 2), random.Random(20230202))),
    ]
