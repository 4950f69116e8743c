"""Multi-dimensional scalable access-policy lattices.

A lattice over dimensions (n_1, ..., n_k) assigns an attribute policy P_c
to every layer coordinate c in the box [1..n_1] x ... x [1..n_k].  Layers
are ordered componentwise; policies must grow monotonically with the
coordinate (P_c is a subset of P_d whenever c <= d), so a higher layer's
privileges always include everything below it.

Layers are partitioned into groups G_1..G_D by L1 distance from the base
corner (D = sum(n_i - 1) + 1).  The *referees* of a layer are its
immediate predecessors — the layers one step below in a single dimension —
except the base, which referees itself.  A usable lattice additionally
refines strictly: every non-base layer must contribute at least one
attribute beyond its group's shared policy and its referees' policies
(``diff_set``).  The access-tree construction hangs exactly those residual
attributes under each layer's key node, which is where the size savings
over per-layer encryption come from.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import FormatError, ValidationError

Coord = tuple[int, ...]

RESERVED_PREFIX = "!"

POLICY_FORMAT = "scpabe/policy"
POLICY_VERSION = 1


def coord_str(c: Coord) -> str:
    return ",".join(str(v) for v in c)


def parse_coord(text: str) -> Coord:
    try:
        coord = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise FormatError(f"bad coordinate {text!r}") from exc
    if not coord:
        raise FormatError(f"bad coordinate {text!r}")
    return coord


def base_coord(dims: Sequence[int]) -> Coord:
    return (1,) * len(dims)


def top_coord(dims: Sequence[int]) -> Coord:
    return tuple(dims)


def layer_coords(dims: Sequence[int]) -> list[Coord]:
    """All coordinates of the box, lexicographically sorted."""
    return sorted(itertools.product(*(range(1, n + 1) for n in dims)))


def dominated(c: Coord, d: Coord) -> bool:
    """True when c <= d componentwise."""
    return all(a <= b for a, b in zip(c, d))


def group_index(c: Coord) -> int:
    """1-based group number: L1 distance from the base corner, plus one."""
    return sum(c) - len(c) + 1


def depth(dims: Sequence[int]) -> int:
    """Number of groups D."""
    return sum(n - 1 for n in dims) + 1


@dataclass(frozen=True)
class PolicyLattice:
    dims: Coord
    policies: Mapping[Coord, frozenset[str]] = field(repr=False)

    @property
    def base(self) -> Coord:
        return base_coord(self.dims)

    def policy(self, c: Coord) -> frozenset[str]:
        return self.policies[c]


def group_partition(dims: Sequence[int]) -> list[list[Coord]]:
    """Groups G_1..G_D, members in lexicographic order."""
    groups: list[list[Coord]] = [[] for _ in range(depth(dims))]
    for c in layer_coords(dims):
        groups[group_index(c) - 1].append(c)
    return groups


def referees(dims: Sequence[int], c: Coord) -> list[Coord]:
    """Immediate predecessors of c; the base corner referees itself."""
    preds = [
        tuple(v - 1 if i == j else v for j, v in enumerate(c))
        for i in range(len(c))
        if c[i] > 1
    ]
    return sorted(preds) if preds else [tuple(c)]


def common_policy(lat: PolicyLattice, d: int) -> frozenset[str]:
    """I_d: intersection of the policies of group G_d."""
    members = group_partition(lat.dims)[d - 1]
    result = lat.policies[members[0]]
    for m in members[1:]:
        result = result & lat.policies[m]
    return result


def union_policy(lat: PolicyLattice, d: int) -> frozenset[str]:
    """U_d: union of the policies of group G_d.  Read-only; the tree
    construction does not consume it."""
    result: frozenset[str] = frozenset()
    for m in group_partition(lat.dims)[d - 1]:
        result = result | lat.policies[m]
    return result


def diff_set(lat: PolicyLattice, c: Coord) -> frozenset[str]:
    """Residual attributes layer c contributes beyond its surroundings.

    P_c minus the intersection of the *other* policies in c's group and
    minus every referee's policy.  (The intersection excludes c itself;
    the top group is always a singleton, and including c there would make
    the residual vacuously empty.)  Defined for non-base layers only.
    """
    if c == lat.base:
        raise ValueError("diff_set is defined for non-base layers")
    others = [m for m in group_partition(lat.dims)[group_index(c) - 1] if m != c]
    removed: set[str] = set()
    if others:
        shared = lat.policies[others[0]]
        for m in others[1:]:
            shared = shared & lat.policies[m]
        removed |= shared
    for r in referees(lat.dims, c):
        removed |= lat.policies[r]
    return lat.policies[c] - removed


def lattice_violations(lat: PolicyLattice) -> list[str]:
    """All validation failures, each naming the offending coordinate and rule."""
    problems: list[str] = []
    dims = lat.dims
    if not dims or any(n < 1 for n in dims):
        return [f"dims {dims} invalid: every dimension must be >= 1"]
    coords = layer_coords(dims)
    missing = [c for c in coords if c not in lat.policies]
    extra = [c for c in lat.policies if c not in set(coords)]
    for c in missing:
        problems.append(f"layer {coord_str(c)}: no policy assigned")
    for c in extra:
        problems.append(f"layer {coord_str(c)}: coordinate outside dims {dims}")
    if problems:
        return problems

    for c in coords:
        for a in lat.policies[c]:
            if not a or not isinstance(a, str):
                problems.append(f"layer {coord_str(c)}: empty or non-string attribute")
            elif a.startswith(RESERVED_PREFIX):
                problems.append(
                    f"layer {coord_str(c)}: attribute {a!r} uses the reserved "
                    f"{RESERVED_PREFIX!r} prefix"
                )
    if not lat.policies[base_coord(dims)]:
        problems.append(f"layer {coord_str(base_coord(dims))}: base policy is empty")

    # Containment along cover edges implies full monotone containment.
    for c in coords:
        if c == base_coord(dims):
            continue
        for r in referees(dims, c):
            if not lat.policies[r] <= lat.policies[c]:
                stray = sorted(lat.policies[r] - lat.policies[c])
                problems.append(
                    f"layer {coord_str(c)}: not monotone — missing {stray} "
                    f"from predecessor {coord_str(r)}"
                )
    if problems:
        return problems

    for c in coords:
        if c == base_coord(dims):
            continue
        if not diff_set(lat, c):
            problems.append(
                f"layer {coord_str(c)}: empty refinement residual — adds nothing "
                "beyond its group and referees"
            )
    return problems


def validate_lattice(lat: PolicyLattice) -> None:
    problems = lattice_violations(lat)
    if problems:
        raise ValidationError("; ".join(problems))


# --- policy documents ---------------------------------------------------


def policy_to_dict(lat: PolicyLattice) -> dict:
    return {
        "format": POLICY_FORMAT,
        "version": POLICY_VERSION,
        "dims": list(lat.dims),
        "layers": {coord_str(c): sorted(lat.policies[c]) for c in layer_coords(lat.dims)},
    }


def policy_from_dict(doc: dict, validate: bool = True) -> PolicyLattice:
    if not isinstance(doc, dict):
        raise FormatError("policy document must be a mapping")
    if doc.get("format", POLICY_FORMAT) != POLICY_FORMAT:
        raise FormatError(f"not a policy document: format {doc.get('format')!r}")
    version = doc.get("version", POLICY_VERSION)
    if version != POLICY_VERSION:
        raise FormatError(f"unsupported policy document version {version!r}")
    try:
        dims = tuple(int(n) for n in doc["dims"])
        layers = doc["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"policy document missing dims/layers: {exc}") from exc
    if not isinstance(layers, dict):
        raise FormatError("policy layers must be a mapping")
    policies: dict[Coord, frozenset[str]] = {}
    for key, attrs in layers.items():
        c = parse_coord(key)
        if c in policies:
            raise FormatError(f"duplicate layer {key!r}")
        if not isinstance(attrs, (list, tuple)) or not all(
            isinstance(a, str) for a in attrs
        ):
            raise FormatError(f"layer {key!r}: attributes must be a list of strings")
        if len(set(attrs)) != len(attrs):
            raise FormatError(f"layer {key!r}: duplicate attributes")
        policies[c] = frozenset(attrs)
    lat = PolicyLattice(dims=dims, policies=policies)
    if validate:
        validate_lattice(lat)
    return lat


def load_policy(path, validate: bool = True) -> PolicyLattice:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    return policy_from_dict(doc, validate=validate)


def dump_policy(lat: PolicyLattice, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(policy_to_dict(lat), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- random lattice generation ------------------------------------------


def random_monotone_lattice(
    dims: Sequence[int],
    rng,
    alphabet: Sequence[str] | int = 12,
) -> PolicyLattice:
    """Random lattice that always validates.

    Non-base layers are covered by small antichain "buckets"; each bucket
    owns a private attribute present exactly on the layers at or above its
    members, which guarantees a nonempty refinement residual everywhere.
    Leftover alphabet symbols are sprinkled over random up-sets for
    variety.  Buckets stay inside a single group and never swallow a whole
    multi-member group, so the private attribute survives the group
    intersection.
    """
    dims = tuple(dims)
    if isinstance(alphabet, int):
        alphabet = [f"a{i:02d}" for i in range(alphabet)]
    symbols = list(alphabet)
    groups = group_partition(dims)

    buckets: list[list[Coord]] = []
    for members in groups[1:]:
        pool = list(members)
        rng.shuffle(pool)
        if len(pool) == 1:
            buckets.append(pool)
            continue
        # Proper subsets only: at least two buckets per multi-member group.
        cut = rng.randrange(1, len(pool))
        for chunk in (pool[:cut], pool[cut:]):
            while len(chunk) > 3:
                buckets.append(chunk[:2])
                chunk = chunk[2:]
            buckets.append(chunk)

    needed = len(buckets) + 1
    if len(symbols) < needed:
        raise ValidationError(
            f"alphabet of {len(symbols)} symbols cannot cover dims {dims}: "
            f"need at least {needed}"
        )
    rng.shuffle(symbols)
    base_attr, symbols = symbols[0], symbols[1:]
    privates, spare = symbols[: len(buckets)], symbols[len(buckets):]

    coords = layer_coords(dims)
    membership: dict[Coord, set[str]] = {c: {base_attr} for c in coords}
    for attr, bucket in zip(privates, buckets):
        for c in coords:
            if any(dominated(b, c) for b in bucket):
                membership[c].add(attr)
    for attr in spare:
        if rng.random() < 0.25:
            continue  # leave some symbols unused for variety
        anchor = coords[rng.randrange(len(coords))]
        for c in coords:
            if dominated(anchor, c):
                membership[c].add(attr)

    lat = PolicyLattice(
        dims=dims, policies={c: frozenset(s) for c, s in membership.items()}
    )
    validate_lattice(lat)
    return lat
