"""Multi-message attribute-based encryption for layered media.

One ciphertext protects every quality layer of a scalable media object
at once: each layer sits at a coordinate of a multi-dimensional policy
lattice, a single shared access tree encodes all the per-layer policies
without repeating their common attributes, and a user key's attribute
set determines exactly which downward-closed region of the lattice it
can open.  On top of the core scheme sits a hybrid packager that seals
real payload bytes under derived content keys, and a CLI that walks the
whole authority/distributor/consumer workflow through plain files.

The public surface re-exported here:

* lattice construction and validation (:mod:`scpabe.lattice`)
* access-tree building and inspection (:mod:`scpabe.tree`)
* the core scheme — setup/keygen/encrypt/decrypt/delegate
  (:mod:`scpabe.abe`)
* serialization of keys and ciphertexts (:mod:`scpabe.storage`)
* media packaging (:mod:`scpabe.vault`)
* the two group providers (:mod:`scpabe.pairing`)
"""

from .abe import (
    Ciphertext,
    MasterKey,
    PublicKey,
    UserKey,
    decrypt,
    delegate,
    encrypt,
    keygen,
    setup,
)
from .errors import (
    CryptoError,
    FormatError,
    IntegrityError,
    NotEntitledError,
    ProviderMismatchError,
    SCPABEError,
    ValidationError,
)
from .lattice import (
    PolicyLattice,
    diff_set,
    group_partition,
    lattice_violations,
    layer_coords,
    load_policy,
    dump_policy,
    random_monotone_lattice,
    referees,
    validate_lattice,
)
from .pairing import BilinearGroup, get_provider
from .storage import (
    dump_ciphertext,
    dump_master_key,
    dump_public_key,
    dump_user_key,
    load_ciphertext,
    load_master_key,
    load_public_key,
    load_user_key,
)
from .tree import AccessTree, build_tree, render_tree, satisfied_key_nodes
from .vault import (
    LayerPayload,
    MediaPackage,
    derive_content_key,
    package,
    read_package,
    unpackage,
    write_package,
)

__version__ = "0.1.0"

__all__ = [
    "AccessTree",
    "BilinearGroup",
    "Ciphertext",
    "CryptoError",
    "FormatError",
    "IntegrityError",
    "LayerPayload",
    "MasterKey",
    "MediaPackage",
    "NotEntitledError",
    "PolicyLattice",
    "ProviderMismatchError",
    "PublicKey",
    "SCPABEError",
    "UserKey",
    "ValidationError",
    "build_tree",
    "decrypt",
    "delegate",
    "derive_content_key",
    "diff_set",
    "dump_ciphertext",
    "dump_master_key",
    "dump_policy",
    "dump_public_key",
    "dump_user_key",
    "encrypt",
    "get_provider",
    "group_partition",
    "keygen",
    "lattice_violations",
    "layer_coords",
    "load_ciphertext",
    "load_master_key",
    "load_policy",
    "load_public_key",
    "load_user_key",
    "package",
    "random_monotone_lattice",
    "read_package",
    "referees",
    "render_tree",
    "satisfied_key_nodes",
    "setup",
    "unpackage",
    "validate_lattice",
    "write_package",
    "__version__",
]
