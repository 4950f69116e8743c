"""Hybrid packaging of layered media.

Each layer of a scalable stream is sealed with an authenticated cipher
under its own content key; the content keys are derived from random G1
elements which in turn are wrapped, all together, in a single
attribute-based ciphertext.  A consumer's key therefore opens exactly
the downward-closed set of layers its attributes entitle it to, and a
single package serves every audience class at once.

On disk a package is a directory containing ``manifest`` (a JSON
document carrying the lattice, the wrapping ciphertext, and the cipher
suite identifiers) plus one binary record per layer, named
``layer-<c_1>_<c_2>_...`` and laid out as ``nonce || ciphertext ||
tag``.  The manifest is written last so a partially written directory
is never mistaken for a complete package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from . import abe, storage
from .errors import FormatError, IntegrityError, ValidationError
from .lattice import (
    Coord,
    PolicyLattice,
    coord_str,
    layer_coords,
    policy_from_dict,
    policy_to_dict,
)
from .pairing import G1Element

VAULT_FORMAT = "scpabe/media-package"
VAULT_VERSION = 1
KDF_ID = "hkdf-sha256"
AEAD_ID = "chacha20poly1305"

NONCE_BYTES = 12
TAG_BYTES = 16

_KDF_LABEL = b"scpabe/content-key/v1"


@dataclass(frozen=True)
class LayerPayload:
    """One layer of the stream to be sealed: a coordinate and its bytes."""

    coord: Coord
    data: bytes


@dataclass
class MediaPackage:
    """A sealed package: parsed manifest plus raw per-layer records."""

    manifest: dict
    records: dict[Coord, bytes] = field(repr=False)

    @property
    def dims(self) -> Coord:
        return tuple(self.manifest["dims"])


def record_name(coord: Coord) -> str:
    """File name of a layer's sealed record, fixed by the format version."""
    return "layer-" + "_".join(str(c) for c in coord)


def derive_content_key(element: G1Element) -> bytes:
    """Derive the 256-bit content key for a wrapped G1 element.

    Deterministic in the element's canonical encoding, so the packager
    and every entitled consumer arrive at the same key independently.
    """
    ikm = _KDF_LABEL + element.group.encode_g1(element)
    kdf = HKDF(algorithm=hashes.SHA256(), length=32, salt=None, info=b"")
    return kdf.derive(ikm)


def package(pk: abe.PublicKey, lat: PolicyLattice, layers: Sequence[LayerPayload], rng) -> MediaPackage:
    """Seal every layer and wrap the content keys in one ciphertext.

    ``layers`` must cover the lattice's coordinate box exactly, with no
    coordinate repeated.
    """
    coords = layer_coords(lat.dims)
    seen: dict[Coord, bytes] = {}
    for payload in layers:
        coord = tuple(payload.coord)
        if coord in seen:
            raise ValidationError(f"duplicate layer coordinate {coord_str(coord)}")
        seen[coord] = payload.data
    expected = set(coords)
    if set(seen) != expected:
        missing = sorted(coord_str(c) for c in expected - set(seen))
        extra = sorted(coord_str(c) for c in set(seen) - expected)
        parts = []
        if missing:
            parts.append(f"missing layers {missing}")
        if extra:
            parts.append(f"unexpected layers {extra}")
        raise ValidationError("; ".join(parts))

    group = pk.group
    elements = {c: group.random_g1(rng) for c in coords}
    ct = abe.encrypt(pk, lat, elements, rng)

    records: dict[Coord, bytes] = {}
    nonces = set()
    for coord in coords:
        key = derive_content_key(elements[coord])
        nonce = rng.randbytes(NONCE_BYTES)
        # Repeating a nonce within one package would be a packaging bug,
        # not an input error.
        assert nonce not in nonces, "nonce repeated within a package"
        nonces.add(nonce)
        sealed = ChaCha20Poly1305(key).encrypt(
            nonce, seen[coord], coord_str(coord).encode("ascii")
        )
        records[coord] = nonce + sealed

    manifest = {
        "format": VAULT_FORMAT,
        "version": VAULT_VERSION,
        "kdf": KDF_ID,
        "aead": AEAD_ID,
        "dims": list(lat.dims),
        "policy": policy_to_dict(lat),
        "ciphertext": json.loads(storage.dump_ciphertext(ct)),
        "layers": {coord_str(c): record_name(c) for c in coords},
    }
    return MediaPackage(manifest=manifest, records=records)


def unpackage(pk: abe.PublicKey, uk: abe.UserKey, pkg: MediaPackage) -> dict[Coord, bytes]:
    """Open every layer the key is entitled to.

    Returns a map from coordinate to recovered bytes; a key that
    satisfies nothing yields an empty map without error.  If a record
    the key should open fails authentication, raises
    :class:`~scpabe.errors.IntegrityError` carrying the failing
    coordinates as ``.failed`` and the successfully opened layers as
    ``.partial`` — tampering with one record never blocks the others.
    """
    ct = _ciphertext_of(pkg)
    elements = abe.decrypt(pk, uk, ct)
    opened: dict[Coord, bytes] = {}
    failed: list[Coord] = []
    for coord in sorted(elements):
        record = pkg.records.get(coord)
        if record is None:
            raise FormatError(f"package has no record for layer {coord_str(coord)}")
        if len(record) < NONCE_BYTES + TAG_BYTES:
            raise FormatError(
                f"record for layer {coord_str(coord)} is too short "
                f"({len(record)} bytes)"
            )
        key = derive_content_key(elements[coord])
        nonce, sealed = record[:NONCE_BYTES], record[NONCE_BYTES:]
        try:
            opened[coord] = ChaCha20Poly1305(key).decrypt(
                nonce, sealed, coord_str(coord).encode("ascii")
            )
        except InvalidTag:
            failed.append(coord)
    if failed:
        err = IntegrityError(
            "authentication failed for layer(s) "
            + ", ".join(coord_str(c) for c in failed)
        )
        err.failed = failed
        err.partial = opened
        raise err
    return opened


def lattice_of(pkg: MediaPackage) -> PolicyLattice:
    """Parse and validate the policy document embedded in the manifest."""
    return policy_from_dict(pkg.manifest["policy"])


def _ciphertext_of(pkg: MediaPackage) -> abe.Ciphertext:
    ct = storage.load_ciphertext(json.dumps(pkg.manifest["ciphertext"]))
    if ct.dims != pkg.dims:
        raise FormatError(
            f"manifest dims {pkg.dims} disagree with the wrapping "
            f"ciphertext's dims {ct.dims}"
        )
    return ct


def write_package(pkg: MediaPackage, directory) -> Path:
    """Write a package to ``directory``; returns the manifest path.

    Records are written first and the manifest last, so the manifest's
    presence marks a complete package.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for coord, record in sorted(pkg.records.items()):
        (directory / record_name(coord)).write_bytes(record)
    manifest_path = directory / "manifest"
    manifest_path.write_text(
        json.dumps(pkg.manifest, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return manifest_path


def read_package(directory) -> MediaPackage:
    """Read and structurally validate a package directory."""
    directory = Path(directory)
    manifest_path = directory / "manifest"
    if not manifest_path.is_file():
        raise FormatError(f"no manifest found in {directory}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise FormatError("manifest must be a JSON object")
    if manifest.get("format") != VAULT_FORMAT:
        raise FormatError(
            f"expected format {VAULT_FORMAT!r}, found {manifest.get('format')!r}"
        )
    if manifest.get("version") != VAULT_VERSION:
        raise FormatError(f"unsupported package version: {manifest.get('version')!r}")
    if manifest.get("kdf") != KDF_ID:
        raise FormatError(
            f"unsupported KDF {manifest.get('kdf')!r}; this build supports {KDF_ID!r}"
        )
    if manifest.get("aead") != AEAD_ID:
        raise FormatError(
            f"unsupported AEAD {manifest.get('aead')!r}; this build supports {AEAD_ID!r}"
        )
    dims = manifest.get("dims")
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(n, int) and n >= 1 for n in dims)
    ):
        raise FormatError("manifest dims must be a list of positive integers")
    dims = tuple(dims)
    lat = policy_from_dict(manifest.get("policy"))
    if lat.dims != dims:
        raise FormatError(
            f"manifest dims {dims} disagree with the policy document's {lat.dims}"
        )
    listing = manifest.get("layers")
    expected = {coord_str(c): record_name(c) for c in layer_coords(dims)}
    if listing != expected:
        raise FormatError("manifest layer listing does not match the coordinate box")
    records: dict[Coord, bytes] = {}
    for coord in layer_coords(dims):
        path = directory / record_name(coord)
        if not path.is_file():
            raise FormatError(f"missing record file {path.name}")
        records[coord] = path.read_bytes()
    stray = sorted(
        p.name
        for p in directory.iterdir()
        if p.name.startswith("layer-") and p.name not in expected.values()
    )
    if stray:
        raise FormatError(f"unexpected record files in package: {stray}")
    pkg = MediaPackage(manifest=manifest, records=records)
    _ciphertext_of(pkg)  # structural check: the wrapped ciphertext parses
    return pkg
