"""Bilinear group providers behind a single element-level contract.

Two interchangeable providers back every cryptographic operation in this
package:

* ``transparent`` — elements carry their own discrete logarithms as plain
  integers mod a fixed prime.  Pairing is integer multiplication, group
  multiplication is exponent addition.  Every algebraic identity in the
  scheme becomes an exact integer statement, which is what the test suite
  leans on.  It offers no security whatsoever.
* ``production`` — a supersingular curve with a genuine Tate pairing (see
  :mod:`scpabe.supersingular`).

Elements remember which provider created them; mixing providers raises
``ProviderMismatchError`` rather than silently computing garbage.  Each
provider publishes a ``GroupDescriptor`` that is embedded in all serialized
material so files from different providers cannot be combined either.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass

from .errors import FormatError, ProviderMismatchError, ValidationError

# Largest prime below 2^160; modulus of the transparent provider.
_TRANSPARENT_ORDER = 2**160 - 47


@dataclass(frozen=True)
class GroupDescriptor:
    """Identity of a provider, embedded in every serialized artifact.

    ``generator`` is the canonical G0 encoding of g in hex; the three
    ``*_bytes`` fields record the fixed encoding widths.
    """

    provider: str
    order: int
    generator: str
    g0_bytes: int
    g1_bytes: int
    scalar_bytes: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GroupDescriptor":
        try:
            return cls(
                provider=str(data["provider"]),
                order=int(data["order"]),
                generator=str(data["generator"]),
                g0_bytes=int(data["g0_bytes"]),
                g1_bytes=int(data["g1_bytes"]),
                scalar_bytes=int(data["scalar_bytes"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed group descriptor: {exc}") from exc


class _Element:
    """Thin wrapper tying a raw provider value to its provider."""

    __slots__ = ("group", "value")

    def __init__(self, group: "BilinearGroup", value):
        self.group = group
        self.value = value

    def _peer(self, other):
        if other.group is not self.group:
            raise ProviderMismatchError(
                f"cannot combine {self.group.descriptor.provider!r} and "
                f"{other.group.descriptor.provider!r} elements"
            )
        return other

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and other.group is self.group
            and other.value == self.value
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return f"{type(self).__name__}({self.group.descriptor.provider}, {self.value!r})"


class G0Element(_Element):
    """Element of the source group G0."""

    def __mul__(self, other: "G0Element") -> "G0Element":
        if not isinstance(other, G0Element):
            return NotImplemented
        return G0Element(self.group, self.group._g0_mul(self.value, self._peer(other).value))

    def __pow__(self, k: int) -> "G0Element":
        return G0Element(self.group, self.group._g0_pow(self.value, k % self.group.order))

    def inverse(self) -> "G0Element":
        return G0Element(self.group, self.group._g0_inv(self.value))

    def encode(self) -> bytes:
        return self.group.encode_g0(self)


class G1Element(_Element):
    """Element of the target group G1 (the pairing's codomain)."""

    def __mul__(self, other: "G1Element") -> "G1Element":
        if not isinstance(other, G1Element):
            return NotImplemented
        return G1Element(self.group, self.group._g1_mul(self.value, self._peer(other).value))

    def __truediv__(self, other: "G1Element") -> "G1Element":
        if not isinstance(other, G1Element):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, k: int) -> "G1Element":
        return G1Element(self.group, self.group._g1_pow(self.value, k % self.group.order))

    def inverse(self) -> "G1Element":
        return G1Element(self.group, self.group._g1_inv(self.value))

    def encode(self) -> bytes:
        return self.group.encode_g1(self)


class BilinearGroup:
    """Provider contract: symmetric pairing e: G0 x G0 -> G1 of prime order."""

    descriptor: GroupDescriptor

    @property
    def order(self) -> int:
        return self.descriptor.order

    @property
    def generator(self) -> G0Element:
        raise NotImplementedError

    def random_scalar(self, rng) -> int:
        """Uniform scalar in [0, order); rng needs only randrange()."""
        return rng.randrange(self.order)

    def random_nonzero_scalar(self, rng, _attempts: int = 64) -> int:
        for _ in range(_attempts):
            v = self.random_scalar(rng)
            if v != 0:
                return v
        raise ValueError("random source kept returning zero scalars")

    def gt_generator(self) -> G1Element:
        """e(g, g), cached — the canonical generator of G1."""
        cached = getattr(self, "_egg", None)
        if cached is None:
            cached = self._egg = self.pair(self.generator, self.generator)
        return cached

    def random_g1(self, rng) -> G1Element:
        """Uniform element of G1, used as per-layer key material."""
        return self.gt_generator() ** self.random_scalar(rng)

    def hash_to_g0(self, label: str) -> G0Element:
        raise NotImplementedError

    def pair(self, a: G0Element, b: G0Element) -> G1Element:
        if a.group is not self or b.group is not self:
            raise ProviderMismatchError("pairing arguments belong to a different provider")
        return G1Element(self, self._pair(a.value, b.value))

    def g1_identity(self) -> G1Element:
        raise NotImplementedError

    # --- canonical fixed-width encodings -------------------------------

    def encode_scalar(self, v: int) -> bytes:
        if not 0 <= v < self.order:
            raise ValueError("scalar out of range")
        return v.to_bytes(self.descriptor.scalar_bytes, "big")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.descriptor.scalar_bytes:
            raise FormatError(
                f"scalar encoding must be {self.descriptor.scalar_bytes} bytes, got {len(data)}"
            )
        v = int.from_bytes(data, "big")
        if v >= self.order:
            raise FormatError("scalar encoding exceeds group order")
        return v

    def encode_g0(self, e: G0Element) -> bytes:
        raise NotImplementedError

    def decode_g0(self, data: bytes) -> G0Element:
        raise NotImplementedError

    def encode_g1(self, e: G1Element) -> bytes:
        raise NotImplementedError

    def decode_g1(self, data: bytes) -> G1Element:
        raise NotImplementedError

    # --- raw value operations, provider-specific -----------------------

    def _g0_mul(self, a, b):
        raise NotImplementedError

    def _g0_pow(self, a, k):
        raise NotImplementedError

    def _g0_inv(self, a):
        raise NotImplementedError

    def _g1_mul(self, a, b):
        raise NotImplementedError

    def _g1_pow(self, a, k):
        raise NotImplementedError

    def _g1_inv(self, a):
        raise NotImplementedError

    def _pair(self, a, b):
        raise NotImplementedError


class TransparentGroup(BilinearGroup):
    """Discrete-log-transparent group: an element *is* its exponent.

    g = 1, so g^a is the integer a mod p; e(g^a, g^b) = ab mod p in a
    separate exponent space for G1.  hash_to_g0 reduces a SHA-256 digest
    of the label mod p.
    """

    def __init__(self):
        p = _TRANSPARENT_ORDER
        width = (p.bit_length() + 7) // 8
        self.descriptor = GroupDescriptor(
            provider="transparent",
            order=p,
            generator=(1).to_bytes(width, "big").hex(),
            g0_bytes=width,
            g1_bytes=width,
            scalar_bytes=width,
        )

    @property
    def generator(self) -> G0Element:
        return G0Element(self, 1)

    def hash_to_g0(self, label: str) -> G0Element:
        if label == "":
            raise ValidationError("cannot hash an empty label to the group")
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        return G0Element(self, int.from_bytes(digest, "big") % self.order)

    def g1_identity(self) -> G1Element:
        return G1Element(self, 0)

    def encode_g0(self, e: G0Element) -> bytes:
        return e.value.to_bytes(self.descriptor.g0_bytes, "big")

    def decode_g0(self, data: bytes) -> G0Element:
        return G0Element(self, self._decode_exponent(data, self.descriptor.g0_bytes))

    def encode_g1(self, e: G1Element) -> bytes:
        return e.value.to_bytes(self.descriptor.g1_bytes, "big")

    def decode_g1(self, data: bytes) -> G1Element:
        return G1Element(self, self._decode_exponent(data, self.descriptor.g1_bytes))

    def _decode_exponent(self, data: bytes, width: int) -> int:
        if len(data) != width:
            raise FormatError(f"element encoding must be {width} bytes, got {len(data)}")
        v = int.from_bytes(data, "big")
        if v >= self.order:
            raise FormatError("element encoding exceeds group order")
        return v

    def _g0_mul(self, a, b):
        return (a + b) % self.order

    def _g0_pow(self, a, k):
        return a * k % self.order

    def _g0_inv(self, a):
        return -a % self.order

    _g1_mul = _g0_mul
    _g1_pow = _g0_pow
    _g1_inv = _g0_inv

    def _pair(self, a, b):
        return a * b % self.order


_PROVIDERS: dict[str, BilinearGroup] = {}


def get_provider(name: str) -> BilinearGroup:
    """Return the shared provider instance for ``name``.

    Instances are cached so element provider checks can compare identity.
    """
    if name not in _PROVIDERS:
        if name == "transparent":
            _PROVIDERS[name] = TransparentGroup()
        elif name == "production":
            from .supersingular import SupersingularGroup

            _PROVIDERS[name] = SupersingularGroup()
        else:
            raise FormatError(f"unknown provider {name!r}")
    return _PROVIDERS[name]


def provider_for_descriptor(desc: GroupDescriptor) -> BilinearGroup:
    """Resolve a descriptor to a known provider, rejecting parameter drift."""
    group = get_provider(desc.provider)
    if group.descriptor != desc:
        raise FormatError(
            f"descriptor for provider {desc.provider!r} does not match this build's parameters"
        )
    return group
