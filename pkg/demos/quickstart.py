"""Walkthrough of the core library: one ciphertext, many entitlement tiers.

A streaming service publishes media in quality layers arranged on a 2x3
grid: resolution rises along one axis, fidelity tier along the other.
Every layer is encrypted once, into a single ciphertext; each subscriber
receives one key cut to their plan, and that key opens exactly the
layers whose attribute policy the subscriber meets.

Run:  python3 demos/quickstart.py
"""

import random

from scpabe import abe
from scpabe.fixtures import worked_2x3
from scpabe.lattice import coord_str, layer_coords
from scpabe.pairing import get_provider
from scpabe.tree import build_tree, render_tree


def main():
    rng = random.Random(2024)
    group = get_provider("transparent")  # fast arithmetic model; same API as production
    lat = worked_2x3()

    print("Layer policies (layer -> attributes required):")
    for coord in layer_coords(lat.dims):
        print(f"  m_{coord_str(coord)}: {sorted(lat.policies[coord])}")

    tree = build_tree(lat)
    naive = sum(len(p) for p in lat.policies.values())
    print(f"\nShared access tree: {tree.leaf_count} leaves "
          f"(one tree per layer would need {naive}).")
    print(render_tree(tree))

    # The authority publishes pk and keeps mk.
    pk, mk = abe.setup(group, rng)

    # One encryption covers every layer.
    messages = {c: group.random_g1(rng) for c in layer_coords(lat.dims)}
    ct = abe.encrypt(pk, lat, messages, rng)

    # Three subscribers on different plans.
    plans = {
        "basic": lat.policies[(1, 1)],
        "silver-sd": lat.policies[(1, 3)],
        "everything": frozenset().union(*lat.policies.values()),
    }
    for name, attrs in plans.items():
        uk = abe.keygen(pk, mk, lat.dims, attrs, rng)
        opened = abe.decrypt(pk, uk, ct)
        got = ", ".join("m_" + coord_str(c) for c in sorted(opened))
        print(f"{name:>11}: opens {got}")
        for c, m in opened.items():
            assert m == messages[c]

    # The "everything" subscriber can hand a narrowed key to a house guest
    # without ever talking to the authority.
    parent = abe.keygen(pk, mk, lat.dims, plans["everything"], rng)
    guest = abe.delegate(pk, parent, lat.policies[(2, 1)], rng)
    opened = abe.decrypt(pk, guest, ct)
    print("guest (delegated down to the HD base plan):",
          ", ".join("m_" + coord_str(c) for c in sorted(opened)))


if __name__ == "__main__":
    main()
