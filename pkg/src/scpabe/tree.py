"""Access-tree construction over a policy lattice.

One tree serves every layer of a lattice.  Each non-base layer c gets a
*key node* R_c — an AND gate over the layer's residual attributes
(``diff_set``) — wrapped with a per-layer uniqueness attribute "!key:c"
into a gate V_c.  The V gates of each group hang under a 1-of-n OR, the
groups stack bottom-up with AND gates, increment gates carry the growth of
the group-intersection policies I_d, and an escape attribute "!grp:d" at
each level lets a decryptor stop climbing above its own group.  The base
layer's policy becomes a plain AND subtree whose root doubles as the base
key node.

Secret shares flow top-down through threshold polynomials; a layer's
message is bound to the sum of its key node's share and the tree secret,
so recovering it takes the key node's subtree plus a satisfied path to the
root.  ``satisfied_key_nodes`` decides which layers a given attribute set
unlocks: the base subtree, every increment gate below the layer's group,
and V_c' for every lattice ancestor c' of the layer must all be satisfied
— which for monotone lattices is exactly "the attributes contain P_c".
Escape attributes substitute only for levels strictly above the layer
being unlocked.

Structural attributes all start with the reserved "!" prefix and are
granted to every key, so they gate *topology*, not privilege.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import FormatError, ValidationError
from .lattice import (
    Coord,
    PolicyLattice,
    base_coord,
    common_policy,
    coord_str,
    depth,
    diff_set,
    dominated,
    group_index,
    group_partition,
    parse_coord,
    validate_lattice,
)

TREE_VERSION = 1

ESCAPE_PREFIX = "!grp:"
UNIQUE_PREFIX = "!key:"


def escape_attr(d: int) -> str:
    return f"{ESCAPE_PREFIX}{d}"


def unique_attr(c: Coord) -> str:
    return f"{UNIQUE_PREFIX}{coord_str(c)}"


def structural_attributes(dims: Sequence[int]) -> frozenset[str]:
    """Escape attributes for levels 1..D-1 plus one uniqueness attribute
    per non-base layer.  Empty for a single-layer lattice."""
    dims = tuple(dims)
    attrs = {escape_attr(d) for d in range(1, depth(dims))}
    base = base_coord(dims)
    for group in group_partition(dims)[1:]:
        for c in group:
            if c != base:
                attrs.add(unique_attr(c))
    return frozenset(attrs)


class TreeNode:
    """Gate (threshold over ordered children) or leaf (attribute label).

    Child indices are 1-based positions in the parent's children list;
    they double as the x-coordinates of the share polynomial.  ``coord``
    marks key nodes.  ``uid`` is the preorder index, assigned by
    AccessTree.
    """

    __slots__ = ("threshold", "children", "attr", "coord", "uid")

    def __init__(self, threshold, children, attr=None, coord=None):
        self.threshold = threshold
        self.children = children
        self.attr = attr
        self.coord = coord
        self.uid = -1

    @property
    def is_leaf(self) -> bool:
        return self.attr is not None

    def __repr__(self):
        if self.is_leaf:
            return f"Leaf({self.attr!r})"
        kind = "OR" if self.threshold == 1 and len(self.children) > 1 else "AND"
        tag = f", key={coord_str(self.coord)}" if self.coord else ""
        return f"Gate({kind} {self.threshold}/{len(self.children)}{tag})"


def _leaf(attr: str) -> TreeNode:
    return TreeNode(1, [], attr=attr)


def _and(children: list[TreeNode], coord: Optional[Coord] = None) -> TreeNode:
    return TreeNode(len(children), children, coord=coord)


def _or(children: list[TreeNode]) -> TreeNode:
    return TreeNode(1, children)


class AccessTree:
    """A built tree plus the index structures decryption needs."""

    def __init__(self, root: TreeNode, dims: Coord):
        self.root = root
        self.dims = tuple(dims)
        self.nodes: list[TreeNode] = []
        self._collect(root)
        self.key_nodes: dict[Coord, TreeNode] = {
            n.coord: n for n in self.nodes if n.coord is not None
        }
        self.base_gate = self.key_nodes[base_coord(self.dims)]
        parents: dict[int, TreeNode] = {}
        for n in self.nodes:
            for ch in n.children:
                parents[ch.uid] = n
        self.v_nodes: dict[Coord, TreeNode] = {
            c: parents[n.uid]
            for c, n in self.key_nodes.items()
            if c != base_coord(self.dims)
        }
        self.q_nodes: dict[int, TreeNode] = self._find_increment_gates()

    def _collect(self, node: TreeNode) -> None:
        node.uid = len(self.nodes)
        self.nodes.append(node)
        for ch in node.children:
            self._collect(ch)

    def _find_increment_gates(self) -> dict[int, TreeNode]:
        """Walk the spine T_2..T_D picking out the increment gates Q_d.

        The construction's shape is rigid: T_d is either the level gate A
        (children = two ORs) or AND(A, Q_{d-1}); V gates are recognized by
        their "!key:" second child.
        """
        q: dict[int, TreeNode] = {}
        if depth(self.dims) < 3:
            return q
        node = self.root.children[1].children[1]
        level = 2
        while not self._is_v(node):
            if node.children[0].threshold == 1:
                a = node
            else:
                a = node.children[0]
                q[level - 1] = node.children[1]
            node = a.children[1].children[1]
            level += 1
        return q

    @staticmethod
    def _is_v(node: TreeNode) -> bool:
        return (
            len(node.children) == 2
            and node.children[1].is_leaf
            and node.children[1].attr.startswith(UNIQUE_PREFIX)
        )

    def leaves(self) -> Iterator[TreeNode]:
        return (n for n in self.nodes if n.is_leaf)

    @property
    def leaf_count(self) -> int:
        return sum(1 for _ in self.leaves())


def build_tree(lat: PolicyLattice) -> AccessTree:
    """Deterministic tree for a validated lattice.

    Layout per level d (root is T_1):

        T_1 = AND( T_base, OR(!grp:1, T_2) )
        T_d = AND( A_d, Q_{d-1} )          for 2 <= d < D, Q omitted if empty
        A_d = AND( OR(V_c for c in G_d), OR(!grp:d, T_{d+1}) )
        T_D = V_top
        V_c = AND( R_c, !key:c );  R_c = AND over diff_set(c)

    Q_d is an AND over I_{d+1} \\ I_d.  Children keep the listed order, so
    the same lattice always yields a byte-identical serialized tree.
    """
    validate_lattice(lat)
    dims = lat.dims
    groups = group_partition(dims)
    d_total = len(groups)
    base = base_coord(dims)

    t_base = _and([_leaf(a) for a in sorted(lat.policies[base])], coord=base)
    if d_total == 1:
        return AccessTree(t_base, dims)

    v_gate: dict[Coord, TreeNode] = {}
    for group in groups[1:]:
        for c in group:
            r_c = _and([_leaf(a) for a in sorted(diff_set(lat, c))], coord=c)
            v_gate[c] = _and([r_c, _leaf(unique_attr(c))])

    commons = [common_policy(lat, d) for d in range(1, d_total + 1)]

    subtree = v_gate[groups[-1][0]]  # T_D: the top group is a singleton
    for d in range(d_total - 1, 1, -1):
        members = groups[d - 1]
        level = _and(
            [
                _or([v_gate[c] for c in members]),
                _or([_leaf(escape_attr(d)), subtree]),
            ]
        )
        increment = commons[d - 1] - commons[d - 2]
        if increment:
            q_gate = _and([_leaf(a) for a in sorted(increment)])
            level = _and([level, q_gate])
        subtree = level

    root = _and([t_base, _or([_leaf(escape_attr(1)), subtree])])
    return AccessTree(root, dims)


# --- secret sharing -----------------------------------------------------


@dataclass
class ShareAssignment:
    secret: int
    shares: dict[int, int] = field(repr=False)


def assign_shares(tree: AccessTree, secret: int, order: int, rng) -> ShareAssignment:
    """Top-down threshold sharing: each gate with threshold k holds a
    random polynomial of degree k-1 with p(0) = its own share; child i
    receives p(i)."""
    shares: dict[int, int] = {}

    def visit(node: TreeNode, value: int) -> None:
        shares[node.uid] = value
        if not node.children:
            return
        coeffs = [value] + [rng.randrange(order) for _ in range(node.threshold - 1)]
        for i, child in enumerate(node.children, start=1):
            acc = 0
            for coeff in reversed(coeffs):
                acc = (acc * i + coeff) % order
            visit(child, acc)

    visit(tree.root, secret % order)
    return ShareAssignment(secret % order, shares)


def lagrange_at_zero(indices: Sequence[int], order: int) -> list[int]:
    """Lagrange coefficients evaluating a polynomial at 0 from the given
    1-based sample indices."""
    coeffs = []
    for i in indices:
        num, den = 1, 1
        for j in indices:
            if j != i:
                num = num * -j % order
                den = den * (i - j) % order
        coeffs.append(num * pow(den, -1, order) % order)
    return coeffs


# --- satisfaction -------------------------------------------------------


def node_satisfied(node: TreeNode, attrs: frozenset[str] | set[str]) -> bool:
    """Standard threshold semantics: a leaf needs its attribute, a gate
    needs >= threshold satisfied children."""
    if node.is_leaf:
        return node.attr in attrs
    hits = 0
    for ch in node.children:
        if node_satisfied(ch, attrs):
            hits += 1
            if hits >= node.threshold:
                return True
    return False


def satisfied_key_nodes(tree: AccessTree, attrs: frozenset[str] | set[str]) -> set[Coord]:
    """Layers the attribute set unlocks: exactly {c : attrs >= P_c}.

    A layer c is satisfied when the root, the base subtree, every
    increment gate below c's group, and V_c' for every ancestor layer
    c' <= c are satisfied.  The union of those gates' leaf demands is
    precisely P_c (plus structural attributes), so escape attributes can
    only ever stand in for levels strictly above c's group.
    """
    attrs = frozenset(attrs)
    cache: dict[int, bool] = {}

    def sat(node: TreeNode) -> bool:
        hit = cache.get(node.uid)
        if hit is None:
            hit = cache[node.uid] = node_satisfied(node, attrs)
        return hit

    if not sat(tree.root) or not sat(tree.base_gate):
        return set()
    base = base_coord(tree.dims)
    result = {base}
    good_v = {c for c, v in tree.v_nodes.items() if sat(v)}
    good_q = {d for d, qn in tree.q_nodes.items() if sat(qn)}
    for c in tree.key_nodes:
        if c == base:
            continue
        ancestors = [a for a in tree.v_nodes if dominated(a, c)]
        if all(a in good_v for a in ancestors) and all(
            d in good_q for d in tree.q_nodes if d < group_index(c)
        ):
            result.add(c)
    return result


# --- serialization ------------------------------------------------------


def tree_to_dict(tree: AccessTree) -> dict:
    nodes = [
        [
            n.threshold,
            len(n.children),
            n.attr,
            coord_str(n.coord) if n.coord is not None else None,
        ]
        for n in tree.nodes
    ]
    return {"version": TREE_VERSION, "dims": list(tree.dims), "nodes": nodes}


def tree_from_dict(doc: dict) -> AccessTree:
    try:
        version = doc["version"]
        dims = tuple(int(n) for n in doc["dims"])
        entries = list(doc["nodes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed tree: {exc}") from exc
    if version != TREE_VERSION:
        raise FormatError(f"unsupported tree version {version!r}")

    pos = 0

    def read() -> TreeNode:
        nonlocal pos
        if pos >= len(entries):
            raise FormatError("truncated tree node list")
        entry = entries[pos]
        pos += 1
        try:
            threshold, n_children, attr, coord = entry
        except (TypeError, ValueError) as exc:
            raise FormatError(f"malformed tree node {entry!r}") from exc
        if attr is not None and n_children:
            raise FormatError("leaf nodes cannot have children")
        children = [read() for _ in range(n_children)]
        if attr is None and not children:
            raise FormatError("gate without children")
        if not children and threshold != 1:
            raise FormatError("leaf threshold must be 1")
        if children and not 1 <= threshold <= len(children):
            raise FormatError(f"threshold {threshold} out of range")
        node = TreeNode(
            threshold,
            children,
            attr=attr,
            coord=parse_coord(coord) if coord is not None else None,
        )
        return node

    root = read()
    if pos != len(entries):
        raise FormatError("trailing tree nodes")
    try:
        return AccessTree(root, dims)
    except (KeyError, IndexError, AttributeError) as exc:
        raise FormatError(f"tree does not have the expected shape: {exc}") from exc


# --- rendering ----------------------------------------------------------


def render_tree(tree: AccessTree, fmt: str = "text") -> str:
    if fmt == "text":
        lines: list[str] = []

        def walk(node: TreeNode, prefix: str, tail: bool, top: bool) -> None:
            if top:
                hook = ""
            else:
                hook = "`- " if tail else "+- "
            if node.is_leaf:
                label = node.attr
            else:
                kind = "OR" if node.threshold == 1 and len(node.children) > 1 else "AND"
                label = f"{kind}({node.threshold}/{len(node.children)})"
                if node.coord is not None:
                    label += f" [key {coord_str(node.coord)}]"
            lines.append(prefix + hook + label)
            ext = "" if top else ("   " if tail else "|  ")
            for i, ch in enumerate(node.children):
                walk(ch, prefix + ext, i == len(node.children) - 1, False)

        walk(tree.root, "", True, True)
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["digraph access_tree {", "  node [shape=box];"]
        for n in tree.nodes:
            if n.is_leaf:
                label = n.attr.replace('"', '\\"')
                lines.append(f'  n{n.uid} [label="{label}" shape=ellipse];')
            else:
                kind = "OR" if n.threshold == 1 and len(n.children) > 1 else "AND"
                label = f"{kind} {n.threshold}/{len(n.children)}"
                if n.coord is not None:
                    label += f"\\nkey {coord_str(n.coord)}"
                lines.append(f'  n{n.uid} [label="{label}"];')
            for ch in n.children:
                lines.append(f"  n{n.uid} -> n{ch.uid};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unknown tree format {fmt!r}")
