"""Command-line workflow around the library.

The subcommands mirror a four-party content-sharing flow, with each
party's state held in plain files: an authority runs ``setup`` and
``keygen``; a distributor runs ``package``; any directory can play the
storage server; consumers run ``unpackage``; and a key holder can
re-issue a narrowed key for someone else with ``delegate``.  ``tree``,
``bench``, and ``policy validate`` inspect structures without touching
key material.

Exit codes are a stable contract:

* 0 — success
* 1 — I/O failure
* 2 — validation or format problem (bad attributes, malformed files,
  bad usage)
* 3 — cryptographic failure: provider mismatch, integrity/authentication
  failure
* 4 — ``unpackage`` ran cleanly but the key opens no layer at all

Seeding is a test-mode convenience: ``--seed`` (or the ``SCPABE_SEED``
environment variable) makes runs reproducible, but only under the
transparent provider.  An explicit ``--seed`` combined with production
key material is refused; the environment variable is silently ignored
in that case so test harness residue cannot weaken real keys.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import abe, bench, storage, vault
from .errors import (
    CryptoError,
    FormatError,
    IntegrityError,
    NotEntitledError,
    ProviderMismatchError,
    ValidationError,
)
from .lattice import (
    coord_str,
    layer_coords,
    lattice_violations,
    load_policy,
)
from .pairing import get_provider
from .tree import build_tree, render_tree

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_CRYPTO = 3
EXIT_NO_ACCESS = 4

SEED_ENV = "SCPABE_SEED"


# -- small helpers -------------------------------------------------------


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp.{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp.{os.getpid()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _requested_seed(args) -> tuple[int | None, bool]:
    """The effective seed and whether it came from the explicit flag."""
    if getattr(args, "seed", None) is not None:
        return args.seed, True
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None, False
    try:
        return int(raw), False
    except ValueError as exc:
        raise ValidationError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def _rng_for(args, provider_name: str, writes_keys: bool):
    """Build the RNG, enforcing the seeding rules for key-writing commands."""
    seed, explicit = _requested_seed(args)
    if seed is not None and provider_name != "transparent" and writes_keys:
        if explicit:
            raise ValidationError(
                "--seed is a test-mode flag and is refused when the "
                f"{provider_name} provider writes key material; "
                "use the transparent provider for reproducible runs"
            )
        seed = None  # environment residue; ignore rather than weaken keys
    if seed is not None:
        return random.Random(seed)
    return random.SystemRandom()


def _parse_attrs(text: str) -> frozenset[str]:
    if text.strip() == "":
        return frozenset()
    attrs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise ValidationError(f"empty attribute in list {text!r}")
        attrs.append(item)
    return frozenset(attrs)


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad dims {text!r}; expected e.g. 2,3") from exc
    if not dims or any(n < 1 for n in dims):
        raise ValidationError(f"bad dims {text!r}; every dimension must be >= 1")
    return dims


def _parse_counts(text: str) -> list[int]:
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                start, stop = parts
                step = 1
            elif len(parts) == 3:
                start, stop, step = parts
            else:
                raise ValueError("too many fields")
            if step < 1:
                raise ValueError("step must be positive")
            counts = list(range(start, stop + 1, step))
        else:
            counts = [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise ValidationError(
            f"bad counts {text!r}; expected e.g. 10,20,30 or 10:100:10"
        ) from exc
    if not counts or any(n < 1 for n in counts):
        raise ValidationError(f"bad counts {text!r}; counts must be >= 1")
    return counts


def _read_text(path) -> str:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return path.read_text(encoding="utf-8")


# -- subcommand handlers -------------------------------------------------


def _cmd_setup(args) -> int:
    rng = _rng_for(args, args.provider, writes_keys=True)
    group = get_provider(args.provider)
    pk, mk = abe.setup(group, rng)
    _atomic_write_text(args.pk, storage.dump_public_key(pk))
    _atomic_write_text(args.mk, storage.dump_master_key(mk))
    print(f"wrote {args.pk} ({args.provider} public key)")
    print(f"wrote {args.mk} ({args.provider} master key)")
    return EXIT_OK


def _cmd_keygen(args) -> int:
    pk = storage.load_public_key(_read_text(args.pk))
    mk = storage.load_master_key(_read_text(args.mk))
    provider = pk.group.descriptor.provider
    rng = _rng_for(args, provider, writes_keys=True)
    if args.policy is not None:
        dims = load_policy(args.policy).dims
    else:
        dims = _parse_dims(args.dims)
    attrs = _parse_attrs(args.attrs)
    uk = abe.keygen(pk, mk, dims, attrs, rng)
    _atomic_write_text(args.out, storage.dump_user_key(uk))
    print(f"wrote {args.out} ({len(attrs)} attribute(s), dims {coord_str(dims)})")
    return EXIT_OK


def _cmd_delegate(args) -> int:
    pk = storage.load_public_key(_read_text(args.pk))
    uk = storage.load_user_key(_read_text(args.sk))
    provider = pk.group.descriptor.provider
    rng = _rng_for(args, provider, writes_keys=True)
    attrs = _parse_attrs(args.attrs)
    child = abe.delegate(pk, uk, attrs, rng)
    _atomic_write_text(args.out, storage.dump_user_key(child))
    print(f"wrote {args.out} (narrowed to {len(attrs)} attribute(s))")
    return EXIT_OK


def _cmd_package(args) -> int:
    pk = storage.load_public_key(_read_text(args.pk))
    provider = pk.group.descriptor.provider
    rng = _rng_for(args, provider, writes_keys=False)
    lat = load_policy(args.policy)
    in_dir = Path(args.in_dir)
    if not in_dir.is_dir():
        raise FileNotFoundError(f"no such directory: {in_dir}")
    payloads = []
    missing = []
    for coord in layer_coords(lat.dims):
        path = in_dir / vault.record_name(coord)
        if not path.is_file():
            missing.append(path.name)
            continue
        payloads.append(vault.LayerPayload(coord, path.read_bytes()))
    if missing:
        raise ValidationError(
            f"input directory {in_dir} is missing layer file(s): {missing}"
        )
    pkg = vault.package(pk, lat, payloads, rng)
    manifest = vault.write_package(pkg, args.out)
    print(f"wrote {len(pkg.records)} sealed record(s) and {manifest}")
    return EXIT_OK


def _cmd_unpackage(args) -> int:
    pk = storage.load_public_key(_read_text(args.pk))
    uk = storage.load_user_key(_read_text(args.sk))
    pkg = vault.read_package(args.in_dir)
    opened = vault.unpackage(pk, uk, pkg)
    if not opened:
        print("no accessible layers for this key", file=sys.stderr)
        return EXIT_NO_ACCESS
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for coord in sorted(opened):
        name = vault.record_name(coord)
        _atomic_write_bytes(out_dir / name, opened[coord])
        print(f"extracted layer {coord_str(coord)} -> {out_dir / name}")
    return EXIT_OK


def _cmd_tree(args) -> int:
    lat = load_policy(args.policy)
    rendered = render_tree(build_tree(lat), args.format)
    if args.out is not None:
        _atomic_write_text(args.out, rendered)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def _cmd_bench(args) -> int:
    group = get_provider(args.provider)
    rng = _rng_for(args, args.provider, writes_keys=False)
    counts = _parse_counts(args.counts)
    rows = bench.run_bench(group, counts, rng, repeat=args.repeat)
    csv = bench.rows_to_csv(rows)
    if args.out is not None:
        _atomic_write_text(args.out, csv)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def _cmd_policy_validate(args) -> int:
    lat = load_policy(args.policy, validate=False)
    problems = lattice_violations(lat)
    if problems:
        for problem in problems:
            print(f"invalid: {problem}", file=sys.stderr)
        return EXIT_USAGE
    n_attrs = len(frozenset().union(*lat.policies.values()))
    print(
        f"ok: {len(lat.policies)} layers over dims {coord_str(lat.dims)}, "
        f"{n_attrs} distinct attribute(s)"
    )
    return EXIT_OK


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scpabe",
        description="Layered-media encryption with lattice-structured access policies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help="test-mode RNG seed (transparent provider only for key material)",
        )

    p = sub.add_parser("setup", help="generate a public/master key pair")
    p.add_argument("--provider", choices=["production", "transparent"], default="production")
    p.add_argument("--pk", default="pk.json", help="output path for the public key")
    p.add_argument("--mk", default="mk.json", help="output path for the master key")
    add_seed(p)
    p.set_defaults(func=_cmd_setup)

    p = sub.add_parser("keygen", help="issue a user key for an attribute set")
    p.add_argument("--pk", required=True)
    p.add_argument("--mk", required=True)
    p.add_argument("--attrs", required=True, help="comma-separated attribute list")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dims", help="lattice shape, e.g. 2,3")
    src.add_argument("--policy", help="policy file to take the shape from")
    p.add_argument("--out", default="sk.json", help="output path for the user key")
    add_seed(p)
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("delegate", help="derive a narrowed key from an existing key")
    p.add_argument("--pk", required=True)
    p.add_argument("--sk", required=True, help="the key to narrow")
    p.add_argument("--attrs", required=True, help="subset of the key's attributes to keep")
    p.add_argument("--out", default="sk-delegated.json")
    add_seed(p)
    p.set_defaults(func=_cmd_delegate)

    p = sub.add_parser("package", help="seal layer files into a package directory")
    p.add_argument("--pk", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--in", dest="in_dir", required=True, help="directory of layer-<c> payload files")
    p.add_argument("--out", required=True, help="package directory to create")
    add_seed(p)
    p.set_defaults(func=_cmd_package)

    p = sub.add_parser("unpackage", help="extract every layer a key can open")
    p.add_argument("--pk", required=True)
    p.add_argument("--sk", required=True)
    p.add_argument("--in", dest="in_dir", required=True, help="package directory")
    p.add_argument("--out", required=True, help="directory for extracted layers")
    p.set_defaults(func=_cmd_unpackage)

    p = sub.add_parser("tree", help="render a policy's access tree")
    p.add_argument("--policy", required=True)
    p.add_argument("--format", choices=["text", "dot"], default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_tree)

    p = sub.add_parser("bench", help="time core operations against leaf count")
    p.add_argument("--provider", choices=["production", "transparent"], default="production")
    p.add_argument("--counts", default="10:100:10", help="leaf counts, e.g. 10,20,30 or 10:100:10")
    p.add_argument("--repeat", type=int, default=1, help="samples per count (median reported)")
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    add_seed(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("policy", help="policy document utilities")
    psub = p.add_subparsers(dest="policy_command", required=True)
    pv = psub.add_parser("validate", help="check a policy document")
    pv.add_argument("--policy", required=True)
    pv.set_defaults(func=_cmd_policy_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProviderMismatchError, CryptoError, IntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CRYPTO
    except NotEntitledError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ACCESS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
