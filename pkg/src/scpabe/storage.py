"""Serialization envelopes for keys and ciphertexts.

Every artifact is a JSON document with a ``format`` tag, a ``version``
number, the generating group's parameter descriptor, and a role-specific
``body``.  Group elements travel as base64 strings of their canonical
encodings, so a dump is deterministic: serializing the same object twice
yields byte-identical text.

Loading reverses the process strictly — wrong role tags, unknown
versions, unknown group parameters, and malformed element encodings all
raise :class:`~scpabe.errors.FormatError` rather than producing a
partially decoded object.
"""

from __future__ import annotations

import base64
import binascii
import json

from .abe import Ciphertext, MasterKey, PublicKey, UserKey
from .errors import FormatError
from .lattice import coord_str, parse_coord
from .pairing import BilinearGroup, GroupDescriptor, provider_for_descriptor
from .tree import tree_from_dict, tree_to_dict

STORAGE_VERSION = 1

ROLE_PUBLIC = "public-key"
ROLE_MASTER = "master-key"
ROLE_USER = "user-key"
ROLE_CIPHERTEXT = "ciphertext"


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def _unb64(text) -> bytes:
    if not isinstance(text, str):
        raise FormatError(f"expected base64 string, got {type(text).__name__}")
    try:
        return base64.b64decode(text.encode("ascii"), validate=True)
    except (binascii.Error, UnicodeEncodeError) as exc:
        raise FormatError(f"invalid base64 payload: {exc}") from exc


def _envelope(role: str, group: BilinearGroup, body: dict) -> str:
    doc = {
        "format": f"scpabe/{role}",
        "version": STORAGE_VERSION,
        "group": group.descriptor.to_dict(),
        "body": body,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _open_envelope(text: str, role: str) -> tuple[BilinearGroup, dict]:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise FormatError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("top-level JSON value must be an object")
    expected = f"scpabe/{role}"
    tag = doc.get("format")
    if tag != expected:
        raise FormatError(f"expected format {expected!r}, found {tag!r}")
    version = doc.get("version")
    if version != STORAGE_VERSION:
        raise FormatError(f"unsupported {role} version: {version!r}")
    desc = doc.get("group")
    if not isinstance(desc, dict):
        raise FormatError(f"{role} is missing its group descriptor")
    group = provider_for_descriptor(GroupDescriptor.from_dict(desc))
    body = doc.get("body")
    if not isinstance(body, dict):
        raise FormatError(f"{role} body must be an object")
    return group, body


def _body_field(body: dict, key: str):
    if key not in body:
        raise FormatError(f"missing field {key!r}")
    return body[key]


# -- public key ---------------------------------------------------------


def dump_public_key(pk: PublicKey) -> str:
    body = {
        "g": _b64(pk.group.encode_g0(pk.g)),
        "h": _b64(pk.group.encode_g0(pk.h)),
        "f": _b64(pk.group.encode_g0(pk.f)),
        "egg_alpha": _b64(pk.group.encode_g1(pk.egg_alpha)),
    }
    return _envelope(ROLE_PUBLIC, pk.group, body)


def load_public_key(text: str) -> PublicKey:
    group, body = _open_envelope(text, ROLE_PUBLIC)
    return PublicKey(
        group=group,
        g=group.decode_g0(_unb64(_body_field(body, "g"))),
        h=group.decode_g0(_unb64(_body_field(body, "h"))),
        f=group.decode_g0(_unb64(_body_field(body, "f"))),
        egg_alpha=group.decode_g1(_unb64(_body_field(body, "egg_alpha"))),
    )


# -- master key ---------------------------------------------------------


def dump_master_key(mk: MasterKey) -> str:
    body = {
        "beta": _b64(mk.group.encode_scalar(mk.beta)),
        "g_alpha": _b64(mk.group.encode_g0(mk.g_alpha)),
    }
    return _envelope(ROLE_MASTER, mk.group, body)


def load_master_key(text: str) -> MasterKey:
    group, body = _open_envelope(text, ROLE_MASTER)
    return MasterKey(
        group=group,
        beta=group.decode_scalar(_unb64(_body_field(body, "beta"))),
        g_alpha=group.decode_g0(_unb64(_body_field(body, "g_alpha"))),
    )


# -- user key -----------------------------------------------------------


def dump_user_key(uk: UserKey) -> str:
    group = uk.group
    body = {
        "dims": list(uk.dims),
        "attrs": sorted(uk.attrs),
        "d": _b64(group.encode_g0(uk.d)),
        "comps": {
            attr: [_b64(group.encode_g0(dj)), _b64(group.encode_g0(djp))]
            for attr, (dj, djp) in sorted(uk.comps.items())
        },
    }
    return _envelope(ROLE_USER, group, body)


def _decode_pair(group: BilinearGroup, value, what: str):
    if not isinstance(value, list) or len(value) != 2:
        raise FormatError(f"{what} must be a two-element list")
    return value


def load_user_key(text: str) -> UserKey:
    group, body = _open_envelope(text, ROLE_USER)
    dims = _body_field(body, "dims")
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(n, int) and n >= 1 for n in dims)
    ):
        raise FormatError("dims must be a list of positive integers")
    attrs = _body_field(body, "attrs")
    if not isinstance(attrs, list) or not all(isinstance(a, str) for a in attrs):
        raise FormatError("attrs must be a list of strings")
    comps_doc = _body_field(body, "comps")
    if not isinstance(comps_doc, dict):
        raise FormatError("comps must be an object")
    comps = {}
    for attr, pair in comps_doc.items():
        dj, djp = _decode_pair(group, pair, f"component for {attr!r}")
        comps[attr] = (group.decode_g0(_unb64(dj)), group.decode_g0(_unb64(djp)))
    return UserKey(
        group=group,
        dims=tuple(dims),
        attrs=frozenset(attrs),
        d=group.decode_g0(_unb64(_body_field(body, "d"))),
        comps=comps,
    )


# -- ciphertext ---------------------------------------------------------


def dump_ciphertext(ct: Ciphertext) -> str:
    group = ct.group
    body = {
        "tree": tree_to_dict(ct.tree),
        "leaves": {
            str(uid): [_b64(group.encode_g0(e)), _b64(group.encode_g0(ep))]
            for uid, (e, ep) in sorted(ct.leaf_comps.items())
        },
        "layers": {
            coord_str(coord): [
                _b64(group.encode_g1(c_tilde)),
                _b64(group.encode_g0(c)),
            ]
            for coord, (c_tilde, c) in sorted(ct.layer_comps.items())
        },
    }
    return _envelope(ROLE_CIPHERTEXT, group, body)


def load_ciphertext(text: str) -> Ciphertext:
    group, body = _open_envelope(text, ROLE_CIPHERTEXT)
    tree_doc = _body_field(body, "tree")
    if not isinstance(tree_doc, dict):
        raise FormatError("tree must be an object")
    tree = tree_from_dict(tree_doc)
    leaves_doc = _body_field(body, "leaves")
    if not isinstance(leaves_doc, dict):
        raise FormatError("leaves must be an object")
    leaf_uids = {node.uid for node in tree.leaves()}
    leaf_comps = {}
    for key, pair in leaves_doc.items():
        try:
            uid = int(key)
        except ValueError as exc:
            raise FormatError(f"leaf id {key!r} is not an integer") from exc
        if uid not in leaf_uids:
            raise FormatError(f"leaf id {uid} does not appear in the tree")
        e, ep = _decode_pair(group, pair, f"leaf component {uid}")
        leaf_comps[uid] = (group.decode_g0(_unb64(e)), group.decode_g0(_unb64(ep)))
    missing = leaf_uids - set(leaf_comps)
    if missing:
        raise FormatError(f"missing leaf components for ids {sorted(missing)}")
    layers_doc = _body_field(body, "layers")
    if not isinstance(layers_doc, dict):
        raise FormatError("layers must be an object")
    layer_comps = {}
    for key, pair in layers_doc.items():
        coord = parse_coord(key)
        c_tilde, c = _decode_pair(group, pair, f"layer component {key}")
        layer_comps[coord] = (
            group.decode_g1(_unb64(c_tilde)),
            group.decode_g0(_unb64(c)),
        )
    expected = set(tree.key_nodes)
    if set(layer_comps) != expected:
        raise FormatError(
            "layer components do not match the tree's layers: "
            f"expected {sorted(coord_str(c) for c in expected)}, "
            f"found {sorted(coord_str(c) for c in layer_comps)}"
        )
    return Ciphertext(
        group=group,
        tree=tree,
        leaf_comps=leaf_comps,
        layer_comps=layer_comps,
    )
