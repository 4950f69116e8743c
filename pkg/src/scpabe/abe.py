"""Multi-message ciphertext-policy ABE over access-policy lattices.

One encryption binds one G1 message per lattice layer to a single shared
access tree.  Key material follows the classic ciphertext-policy shape:

    setup:    PK = (g, h = g^beta, f = g^(1/beta), e(g,g)^alpha),
              MK = (beta, g^alpha)
    keygen:   D = g^((alpha + r)/beta), and per attribute j:
              D_j = g^r * H(j)^{r_j},  D_j' = g^{r_j}
    encrypt:  per leaf x:  E_x = g^{q_x(0)},  E_x' = H(att(x))^{q_x(0)};
              per layer c: C~_c = m_c * e(g,g)^{alpha (q_{R_c}(0) + s)},
                           C_c  = h^{q_{R_c}(0) + s}
    decrypt:  F_x = e(D_j, E_x) / e(D_j', E_x') = e(g,g)^{r q_x(0)},
              Lagrange interpolation lifts F values up the tree, and
              m_c = C~_c / ( e(C_c, D) / (F_{R_c} * F_root) ).

The per-key blinding exponent r is what defeats collusion: F values from
different keys interpolate to nothing useful, and D is the only place r
can be cancelled.  Delegation re-randomizes a key down to an attribute
subset (r' = r + r~) without the master key, so delegated keys are
distributionally identical to fresh ones.

All routines work against either provider; mixing material from different
providers is rejected before any algebra happens.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import (
    CryptoError,
    FormatError,
    ProviderMismatchError,
    ValidationError,
)
from .lattice import Coord, PolicyLattice, coord_str, layer_coords
from .pairing import BilinearGroup, G0Element, G1Element
from .tree import (
    AccessTree,
    TreeNode,
    assign_shares,
    build_tree,
    lagrange_at_zero,
    satisfied_key_nodes,
    structural_attributes,
)


@dataclass
class PublicKey:
    group: BilinearGroup
    g: G0Element
    h: G0Element
    f: G0Element
    egg_alpha: G1Element


@dataclass
class MasterKey:
    group: BilinearGroup
    beta: int
    g_alpha: G0Element


@dataclass
class UserKey:
    group: BilinearGroup
    dims: Coord
    attrs: frozenset[str]
    d: G0Element
    comps: dict[str, tuple[G0Element, G0Element]] = field(repr=False)


@dataclass
class Ciphertext:
    group: BilinearGroup
    tree: AccessTree
    leaf_comps: dict[int, tuple[G0Element, G0Element]] = field(repr=False)
    layer_comps: dict[Coord, tuple[G1Element, G0Element]] = field(repr=False)

    @property
    def dims(self) -> Coord:
        return self.tree.dims


def _same_group(*parts) -> BilinearGroup:
    group = parts[0].group
    for part in parts[1:]:
        if part.group is not group:
            raise ProviderMismatchError(
                "key material and ciphertext come from different providers"
            )
    return group


def setup(group: BilinearGroup, rng) -> tuple[PublicKey, MasterKey]:
    alpha = group.random_scalar(rng)
    beta = group.random_nonzero_scalar(rng)
    g = group.generator
    pk = PublicKey(
        group=group,
        g=g,
        h=g**beta,
        f=g ** pow(beta, -1, group.order),
        egg_alpha=group.gt_generator() ** alpha,
    )
    return pk, MasterKey(group=group, beta=beta, g_alpha=g**alpha)


def keygen(
    pk: PublicKey,
    mk: MasterKey,
    dims: Sequence[int],
    attrs,
    rng,
) -> UserKey:
    """Issue a key for ``attrs`` on a lattice shape.

    Structural attributes for ``dims`` are appended automatically; caller
    attributes must not use the reserved "!" prefix.
    """
    group = _same_group(pk, mk)
    dims = tuple(dims)
    attrs = frozenset(attrs)
    reserved = sorted(a for a in attrs if a.startswith("!"))
    if reserved:
        raise ValidationError(
            f"attributes {reserved} use the reserved '!' prefix; "
            "structural attributes are granted automatically"
        )
    full = attrs | structural_attributes(dims)
    order = group.order
    r = group.random_scalar(rng)
    g_r = pk.g**r
    comps = {}
    for a in sorted(full):
        r_j = group.random_scalar(rng)
        comps[a] = (g_r * group.hash_to_g0(a) ** r_j, pk.g**r_j)
    d = (mk.g_alpha * g_r) ** pow(mk.beta, -1, order)
    return UserKey(group=group, dims=dims, attrs=full, d=d, comps=comps)


def encrypt(
    pk: PublicKey,
    lat: PolicyLattice,
    messages: Mapping[Coord, G1Element],
    rng,
) -> Ciphertext:
    """Encrypt one G1 message per layer under the lattice's shared tree."""
    group = pk.group
    expected = set(layer_coords(lat.dims))
    got = set(messages)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        raise ValidationError(
            f"messages must cover every layer exactly: missing "
            f"{[coord_str(c) for c in missing]}, extra {[coord_str(c) for c in extra]}"
        )
    for c, m in messages.items():
        if not isinstance(m, G1Element) or m.group is not group:
            raise ProviderMismatchError(
                f"message for layer {coord_str(c)} is not a G1 element of this provider"
            )

    tree = build_tree(lat)
    order = group.order
    s = group.random_scalar(rng)
    shares = assign_shares(tree, s, order, rng)

    leaf_comps = {}
    for leaf in tree.leaves():
        share = shares.shares[leaf.uid]
        leaf_comps[leaf.uid] = (
            pk.g**share,
            group.hash_to_g0(leaf.attr) ** share,
        )

    layer_comps = {}
    for c in sorted(tree.key_nodes):
        exp = (shares.shares[tree.key_nodes[c].uid] + s) % order
        layer_comps[c] = (messages[c] * pk.egg_alpha**exp, pk.h**exp)
    return Ciphertext(group=group, tree=tree, leaf_comps=leaf_comps, layer_comps=layer_comps)


def decrypt_leaf(uk: UserKey, ct: Ciphertext, leaf: TreeNode) -> G1Element:
    """F_x = e(D_j, E_x) / e(D_j', E_x') for a leaf the key has a component for.

    Lacking the leaf's attribute is an error, never a wrong value: a
    blinded F is only meaningful when the matching key component exists.
    """
    pair_d = uk.comps.get(leaf.attr)
    if pair_d is None:
        raise CryptoError(f"key has no component for attribute {leaf.attr!r}")
    comp = ct.leaf_comps.get(leaf.uid)
    if comp is None:
        raise FormatError(f"ciphertext is missing the component for leaf {leaf.uid}")
    group = uk.group
    return group.pair(pair_d[0], comp[0]) / group.pair(pair_d[1], comp[1])


def interpolate_gate(
    values: Sequence[tuple[int, G1Element]], order: int
) -> G1Element:
    """Combine child F values (1-based child index, value) at x = 0."""
    indices = [i for i, _ in values]
    coeffs = lagrange_at_zero(indices, order)
    result = None
    for (_, value), lam in zip(values, coeffs):
        term = value**lam
        result = term if result is None else result * term
    return result


def _evaluate(
    uk: UserKey,
    ct: Ciphertext,
    node: TreeNode,
    cache: dict[int, Optional[G1Element]],
) -> Optional[G1Element]:
    if node.uid in cache:
        return cache[node.uid]
    if node.is_leaf:
        value = decrypt_leaf(uk, ct, node) if node.attr in uk.comps else None
    else:
        collected: list[tuple[int, G1Element]] = []
        for i, child in enumerate(node.children, start=1):
            f = _evaluate(uk, ct, child, cache)
            if f is not None:
                collected.append((i, f))
                if len(collected) == node.threshold:
                    break  # lowest-index children win, deterministically
        if len(collected) < node.threshold:
            value = None
        elif node.threshold == 1:
            value = collected[0][1]
        else:
            value = interpolate_gate(collected, uk.group.order)
    cache[node.uid] = value
    return value


def decrypt(pk: PublicKey, uk: UserKey, ct: Ciphertext) -> dict[Coord, G1Element]:
    """Recover every layer message the key's attributes unlock.

    Returns an empty mapping (not an error) when the key satisfies
    nothing; raises when the key was issued for a different lattice shape
    or provider.
    """
    group = _same_group(pk, uk, ct)
    if uk.dims != ct.tree.dims:
        raise CryptoError(
            f"key is bound to dims {uk.dims}, ciphertext uses {ct.tree.dims}"
        )
    needed = structural_attributes(ct.tree.dims)
    if not needed <= uk.attrs:
        raise CryptoError("key lacks the ciphertext's structural attributes")

    sat = satisfied_key_nodes(ct.tree, uk.attrs)
    if not sat:
        return {}
    cache: dict[int, Optional[G1Element]] = {}
    f_root = _evaluate(uk, ct, ct.tree.root, cache)
    if f_root is None:
        raise CryptoError("internal inconsistency: satisfied tree failed to evaluate")
    out: dict[Coord, G1Element] = {}
    for c in sorted(sat):
        f_key = _evaluate(uk, ct, ct.tree.key_nodes[c], cache)
        if f_key is None:
            raise CryptoError("internal inconsistency: satisfied key node failed")
        comp = ct.layer_comps.get(c)
        if comp is None:
            raise FormatError(f"ciphertext is missing layer {coord_str(c)}")
        c_tilde, c_plain = comp
        k_c = f_key * f_root
        out[c] = c_tilde / (group.pair(c_plain, uk.d) / k_c)
    return out


def delegate(pk: PublicKey, uk: UserKey, subset, rng) -> UserKey:
    """Derive an independent key for an attribute subset, master-key-free.

    Structural attributes are force-retained; everything else must come
    from the source key.  The result is re-randomized: its blinding is
    r + r~ with fresh r~, so it cannot be linked to (or combined with)
    the source key any more than a fresh key could.
    """
    group = _same_group(pk, uk)
    subset = frozenset(subset)
    stray = sorted(subset - uk.attrs)
    if stray:
        raise ValidationError(f"cannot delegate attributes the key lacks: {stray}")
    keep = subset | structural_attributes(uk.dims)
    order = group.order
    r_t = group.random_scalar(rng)
    g_rt = pk.g**r_t
    comps = {}
    for a in sorted(keep):
        d_a, d_a_prime = uk.comps[a]
        r_j = group.random_scalar(rng)
        comps[a] = (
            d_a * g_rt * group.hash_to_g0(a) ** r_j,
            d_a_prime * pk.g**r_j,
        )
    d = uk.d * pk.f**r_t
    return UserKey(group=group, dims=uk.dims, attrs=keep, d=d, comps=comps)
