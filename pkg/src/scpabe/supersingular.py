"""Production pairing group on a type-A supersingular curve.

Curve: y^2 = x^3 + x over F_q with q a 512-bit prime, q = 3 (mod 4).  The
curve is supersingular with #E(F_q) = q + 1 = h * p, where the group order
p = 2^159 + 2^17 + 1 is a 160-bit prime of Hamming weight 3 (a sparse
Miller loop) and h is the cofactor.  G0 is the order-p subgroup of E(F_q).

Because q = 3 (mod 4), -1 is a non-residue and F_q^2 = F_q(i) with
i^2 = -1.  The distortion map phi(x, y) = (-x, i*y) sends G0 to a linearly
independent order-p subgroup of E(F_q^2), so

    e(P, Q) = f_{p,P}(phi(Q)) ^ ((q^2 - 1) / p)

is a symmetric, non-degenerate bilinear pairing G0 x G0 -> G1, where G1 is
the order-p subgroup of F_q^2*.  The embedding degree is 2 (p | q + 1 and
p does not divide q - 1), which admits denominator elimination: vertical
lines evaluate into F_q and are annihilated by the (q - 1) factor of the
final exponentiation, so the Miller loop skips them entirely.

All parameters are fixed constants, generated once by a deterministic
search (smallest Solinas-form order, then smallest qualifying cofactor,
then smallest base-point x).  The 512-bit field / 160-bit order sizing is
research-grade: adequate to study the scheme's behavior and costs, far too
small to protect real data, and — like all pairing-based constructions —
not post-quantum.  Do not use this module to secure anything that matters.
"""

from __future__ import annotations

import hashlib

import gmpy2
from gmpy2 import mpz

from .errors import FormatError, ValidationError
from .pairing import BilinearGroup, G0Element, G1Element, GroupDescriptor

# Group order: 2^159 + 2^17 + 1 (prime, Hamming weight 3).
ORDER = mpz(730750818665451459101842416358141509827966402561)

# Field prime, q = h * p - 1, q = 3 (mod 4), 512 bits.
FIELD = mpz(
    6703903964971298549787012499102923063739682910296196688861780721860882015036773488400937149083451713846223129445678351237313185116483446425591713270072947
)

# Cofactor h = (q + 1) / p.
COFACTOR = mpz(
    9173994463960286046443283581208347763186258311156012970273539841050837368157018916712299020380507488650868
)

# Base point of order p (cofactor-cleared from the smallest curve point).
GX = mpz(
    1550230910061631717295326726040489196655732425887425787918483002738464333463642104136933229477931077385061142538084254497088139170873375843150573745621528
)
GY = mpz(
    6283229369025158275287313652491676411284821945876642922195493166508207367773119385377302155328009815905092803571486446942640059551798106431792721918611751
)

_ORDER_BITS = bin(ORDER)[3:]  # bits below the MSB, for the Miller loop
_SQRT_EXP = (FIELD + 1) // 4
_LEGENDRE_EXP = (FIELD - 1) // 2


# --- F_q^2 arithmetic: elements are (a, b) meaning a + b*i, i^2 = -1 ----


def _fq2_mul(x, y, q=FIELD):
    a, b = x
    c, d = y
    t1 = a * c
    t2 = b * d
    t3 = (a + b) * (c + d)
    return ((t1 - t2) % q, (t3 - t1 - t2) % q)


def _fq2_sqr(x, q=FIELD):
    a, b = x
    return ((a - b) * (a + b) % q, 2 * a * b % q)


def _fq2_conj(x, q=FIELD):
    a, b = x
    return (a, -b % q)


def _fq2_inv(x, q=FIELD):
    a, b = x
    n = gmpy2.invert(a * a + b * b, q)
    return (a * n % q, -b * n % q)


def _fq2_pow(x, e, q=FIELD):
    r = (mpz(1), mpz(0))
    for bit in bin(e)[2:]:
        r = _fq2_sqr(r, q)
        if bit == "1":
            r = _fq2_mul(r, x, q)
    return r


# --- affine curve arithmetic on y^2 = x^3 + x; None is the point at infinity


def _pt_add(p1, p2, q=FIELD):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        if (y1 + y2) % q == 0:
            return None
        lam = (3 * x1 * x1 + 1) * gmpy2.invert(2 * y1, q) % q
    else:
        lam = (y2 - y1) * gmpy2.invert(x2 - x1, q) % q
    x3 = (lam * lam - x1 - x2) % q
    return (x3, (lam * (x1 - x3) - y1) % q)


def _pt_neg(p, q=FIELD):
    if p is None:
        return None
    return (p[0], -p[1] % q)


def _pt_mul(p, k, q=FIELD):
    if k == 0 or p is None:
        return None
    r = None
    for bit in bin(k)[2:]:
        r = _pt_add(r, r, q)
        if bit == "1":
            r = _pt_add(r, p, q)
    return r


def _on_curve(x, y, q=FIELD):
    return (y * y - (x * x * x + x)) % q == 0


def _miller(pt_p, pt_q, q=FIELD):
    """f_{p,P} evaluated at phi(Q), vertical lines elided.

    phi(Q) = (-x_Q, i*y_Q): its x-coordinate lies in F_q, so every vertical
    line through the loop evaluates into F_q and dies in the final
    exponentiation.  The imaginary part of each remaining line value is
    y_Q != 0, so line values never vanish.
    """
    xp, yp = pt_p
    xq = -pt_q[0] % q
    yq = pt_q[1]
    f = (mpz(1), mpz(0))
    xt, yt = xp, yp
    infinity = False
    for bit in _ORDER_BITS:
        f = _fq2_sqr(f, q)
        if not infinity:
            if yt == 0:
                infinity = True  # 2-torsion: tangent is vertical, elided
            else:
                lam = (3 * xt * xt + 1) * gmpy2.invert(2 * yt, q) % q
                f = _fq2_mul(f, ((lam * (xt - xq) - yt) % q, yq), q)
                x3 = (lam * lam - 2 * xt) % q
                yt = (lam * (xt - x3) - yt) % q
                xt = x3
        if bit == "1" and not infinity:
            if xt == xp:
                # T = -P: the connecting line is vertical, elided.
                infinity = (yt + yp) % q == 0
                if not infinity:
                    lam = (3 * xt * xt + 1) * gmpy2.invert(2 * yt, q) % q
                    f = _fq2_mul(f, ((lam * (xt - xq) - yt) % q, yq), q)
                    x3 = (lam * lam - 2 * xt) % q
                    yt = (lam * (xt - x3) - yt) % q
                    xt = x3
            else:
                lam = (yp - yt) * gmpy2.invert(xp - xt, q) % q
                f = _fq2_mul(f, ((lam * (xt - xq) - yt) % q, yq), q)
                x3 = (lam * lam - xt - xp) % q
                yt = (lam * (xt - x3) - yt) % q
                xt = x3
    return f


def _final_exp(f, q=FIELD):
    """f ^ ((q^2-1)/p) via f^(q-1) = conj(f)^2 / |f|^2, then ^cofactor."""
    a, b = f
    n = gmpy2.invert(a * a + b * b, q)
    c = _fq2_conj(f, q)
    z = _fq2_sqr(c, q)
    z = (z[0] * n % q, z[1] * n % q)
    return _fq2_pow(z, COFACTOR, q)


_FQ2_ONE = (mpz(1), mpz(0))


class SupersingularGroup(BilinearGroup):
    """The frozen type-A curve as a provider.

    G0 values are affine points (mpz, mpz) or None for infinity; G1 values
    are F_q^2 pairs in the order-p subgroup (norm 1, so inversion is
    conjugation).  Encodings: G0 compressed to 65 bytes (parity prefix
    0x02/0x03 + big-endian x; all-zero means infinity), G1 as the two
    64-byte coordinates, scalars as 20 bytes.
    """

    def __init__(self):
        width = (int(FIELD).bit_length() + 7) // 8
        g_enc = bytes([0x02 | int(GY & 1)]) + int(GX).to_bytes(width, "big")
        self.descriptor = GroupDescriptor(
            provider="production",
            order=int(ORDER),
            generator=g_enc.hex(),
            g0_bytes=1 + width,
            g1_bytes=2 * width,
            scalar_bytes=(int(ORDER).bit_length() + 7) // 8,
        )
        self._field_bytes = width
        self._h2g_cache: dict[str, tuple] = {}

    @property
    def generator(self) -> G0Element:
        return G0Element(self, (GX, GY))

    def hash_to_g0(self, label: str) -> G0Element:
        if label == "":
            raise ValidationError("cannot hash an empty label to the group")
        cached = self._h2g_cache.get(label)
        if cached is None:
            cached = self._hash_to_point(label)
            self._h2g_cache[label] = cached
        return G0Element(self, cached)

    def _hash_to_point(self, label: str):
        """Try-and-increment onto the curve, then clear the cofactor."""
        encoded = label.encode("utf-8")
        seed = b"scpabe/hash-to-g0/" + len(encoded).to_bytes(4, "big") + encoded
        for counter in range(10_000):
            digest = hashlib.sha512(seed + counter.to_bytes(4, "big")).digest()
            x = mpz(int.from_bytes(digest, "big")) % FIELD
            t = (x * x * x + x) % FIELD
            if t == 0:
                continue
            if gmpy2.powmod(t, _LEGENDRE_EXP, FIELD) != 1:
                continue
            y = gmpy2.powmod(t, _SQRT_EXP, FIELD)
            if y * y % FIELD != t:
                continue
            pt = _pt_mul((x, min(y, FIELD - y)), COFACTOR)
            if pt is not None:
                return pt
        raise RuntimeError(f"hash_to_g0 failed to find a curve point for {label!r}")

    def g1_identity(self) -> G1Element:
        return G1Element(self, _FQ2_ONE)

    def encode_g0(self, e: G0Element) -> bytes:
        if e.value is None:
            return bytes(self.descriptor.g0_bytes)
        x, y = e.value
        return bytes([0x02 | int(y & 1)]) + int(x).to_bytes(self._field_bytes, "big")

    def decode_g0(self, data: bytes) -> G0Element:
        if len(data) != self.descriptor.g0_bytes:
            raise FormatError(
                f"G0 encoding must be {self.descriptor.g0_bytes} bytes, got {len(data)}"
            )
        if data == bytes(self.descriptor.g0_bytes):
            return G0Element(self, None)
        prefix = data[0]
        if prefix not in (0x02, 0x03):
            raise FormatError("bad G0 compression prefix")
        x = mpz(int.from_bytes(data[1:], "big"))
        if x >= FIELD:
            raise FormatError("G0 x-coordinate exceeds the field")
        t = (x * x * x + x) % FIELD
        y = gmpy2.powmod(t, _SQRT_EXP, FIELD)
        if y * y % FIELD != t:
            raise FormatError("G0 encoding is not a curve point")
        if int(y & 1) != (prefix & 1):
            y = (-y) % FIELD
        pt = (x, y)
        if _pt_mul(pt, ORDER) is not None:
            raise FormatError("G0 point is outside the prime-order subgroup")
        return G0Element(self, pt)

    def encode_g1(self, e: G1Element) -> bytes:
        a, b = e.value
        w = self._field_bytes
        return int(a).to_bytes(w, "big") + int(b).to_bytes(w, "big")

    def decode_g1(self, data: bytes) -> G1Element:
        if len(data) != self.descriptor.g1_bytes:
            raise FormatError(
                f"G1 encoding must be {self.descriptor.g1_bytes} bytes, got {len(data)}"
            )
        w = self._field_bytes
        a = mpz(int.from_bytes(data[:w], "big"))
        b = mpz(int.from_bytes(data[w:], "big"))
        if a >= FIELD or b >= FIELD:
            raise FormatError("G1 coordinate exceeds the field")
        v = (a, b)
        if v == (0, 0) or _fq2_pow(v, ORDER) != _FQ2_ONE:
            raise FormatError("G1 encoding is outside the order-p subgroup")
        return G1Element(self, v)

    # --- raw operations ------------------------------------------------

    def _g0_mul(self, a, b):
        return _pt_add(a, b)

    def _g0_pow(self, a, k):
        return _pt_mul(a, k)

    def _g0_inv(self, a):
        return _pt_neg(a)

    def _g1_mul(self, a, b):
        return _fq2_mul(a, b)

    def _g1_pow(self, a, k):
        return _fq2_pow(a, k)

    def _g1_inv(self, a):
        # G1 elements have norm 1, so inversion is conjugation.
        return _fq2_conj(a)

    def _pair(self, a, b):
        if a is None or b is None:
            return _FQ2_ONE
        return _final_exp(_miller(a, b))
