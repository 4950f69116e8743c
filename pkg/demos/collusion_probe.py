"""Why two half-entitled keys are not one full key.

Each issued key blinds its holder's attribute components with a private
random exponent r.  Shares recovered under different r values do not
interpolate to anything useful, so users cannot pool keys to climb the
lattice.  This script mounts the pooling attack directly and shows the
recovered element is noise.

Run:  python3 demos/collusion_probe.py
"""

import random

from scpabe import abe
from scpabe.fixtures import split_base_2x1
from scpabe.lattice import layer_coords
from scpabe.pairing import get_provider


def main():
    rng = random.Random(99)
    group = get_provider("transparent")
    lat = split_base_2x1()  # base layer requires BOTH b0 and b1
    pk, mk = abe.setup(group, rng)
    messages = {c: group.random_g1(rng) for c in layer_coords(lat.dims)}
    ct = abe.encrypt(pk, lat, messages, rng)

    alice = abe.keygen(pk, mk, lat.dims, {"b0"}, rng)
    bob = abe.keygen(pk, mk, lat.dims, {"b1"}, rng)
    carol = abe.keygen(pk, mk, lat.dims, {"b0", "b1"}, rng)

    print("Individually:")
    print("  alice (b0 only):", abe.decrypt(pk, alice, ct) or "nothing")
    print("  bob   (b1 only):", abe.decrypt(pk, bob, ct) or "nothing")
    print("  carol (b0, b1): opens", sorted(abe.decrypt(pk, carol, ct)))

    # The pooling attack: alice contributes her blinded share for the b0
    # leaf, bob his for b1, and they interpolate at the base gate exactly
    # the way a legitimate decryption would.
    base_gate = ct.tree.key_nodes[(1, 1)]
    leaf_b0, leaf_b1 = base_gate.children
    f_alice = abe.decrypt_leaf(alice, ct, leaf_b0)
    f_bob = abe.decrypt_leaf(bob, ct, leaf_b1)
    mixed = abe.interpolate_gate([(1, f_alice), (2, f_bob)], group.order)

    # Finish the decryption formula with the mixed value and alice's D.
    f_root_guess = mixed  # the best the pair can do for the root as well
    c_tilde, c_plain = ct.layer_comps[(1, 1)]
    candidate = c_tilde / (group.pair(c_plain, alice.d) / (mixed * f_root_guess))

    truth = messages[(1, 1)]
    print("\nPooled attack on the base layer:")
    print(f"  true message element: {truth}")
    print(f"  attack recovered:     {candidate}")
    print("  equal?", candidate == truth)
    assert candidate != truth, "pooled keys must not decrypt"
    print("\nBlinding factors differ per key, so mixed shares are garbage.")


if __name__ == "__main__":
    main()
