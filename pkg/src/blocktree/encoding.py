"""Block codecs.

Every leaf block stores its entries through a codec with three methods:
``encoded_size`` (bytes the encoding will occupy), ``encode`` (entries to
payload) and ``decode`` (payload back to entries).  Codecs are stateless and
safe to share between threads.

Two byte-oriented codecs ship with the library:

``IdentityCodec``
    Fixed-width little-endian concatenation, one ``[key][value]`` pair per
    entry.  Size is ``count * (key_width + value_width)``.

``DeltaCodec``
    For nonnegative integer keys, strictly increasing within a block::

        [first key: key_width bytes LE]
        [gap varints x (count - 1)]
        [values: value_width bytes LE x count]

    Gaps are classic little-endian base-128 varints: low seven bits per
    byte, high bit set on every byte except the last.  Decoding is strictly
    sequential within a block; no parallel-decode claim is made.  Values are
    stored raw; ``value_width=0`` drops them entirely (sets).

``ObjectCodec`` keeps entries as a plain tuple for payloads that are not
byte-packable (sequences of arbitrary elements, nested tree handles).  Its
reported size is a nominal pointer-model estimate.
"""

import struct

from .errors import CodecError, CorruptionError


def varint_len(value):
    if value < 0:
        raise CodecError("varints encode nonnegative integers only")
    n = 1
    while value >= 0x80:
        value >>= 7
        n += 1
    return n


def write_varint(value, out):
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)


def read_varint(buf, pos):
    """Decode one varint at ``pos``; returns (value, next_pos)."""
    result = 0
    shift = 0
    n = len(buf)
    while True:
        if pos >= n:
            raise CorruptionError("truncated varint")
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7
        if shift > 70:
            raise CorruptionError("malformed varint (too many continuation bytes)")


def _check_uint(x, width, what):
    if not isinstance(x, int) or isinstance(x, bool):
        raise CodecError(f"{what} must be an integer, got {type(x).__name__}")
    if x < 0 or x >> (8 * width):
        raise CodecError(f"{what} {x} out of range for {width} bytes")


class EncodingScheme:
    """Codec interface; subclasses implement the three methods below."""

    name = "abstract"
    # True when the codec cannot read its first/last key in O(1) from the
    # payload, so the block header carries cached key bounds.
    caches_bounds = False
    # False when keys are not byte-packed integers (object payloads).
    byte_oriented = True

    def encoded_size(self, entries):
        raise NotImplementedError

    def encode(self, entries):
        raise NotImplementedError

    def decode(self, payload, count):
        raise NotImplementedError


class IdentityCodec(EncodingScheme):
    name = "identity"

    def __init__(self, key_width=8, value_width=8):
        self.key_width = key_width
        self.value_width = value_width
        self._key = struct.Struct("<Q" if key_width == 8 else f"<{key_width}B")

    def encoded_size(self, entries):
        return len(entries) * (self.key_width + self.value_width)

    def encode(self, entries):
        kw, vw = self.key_width, self.value_width
        out = bytearray()
        for k, v in entries:
            _check_uint(k, kw, "key")
            out += k.to_bytes(kw, "little")
            if vw:
                _check_uint(v, vw, "value")
                out += v.to_bytes(vw, "little")
        return bytes(out)

    def decode(self, payload, count):
        kw, vw = self.key_width, self.value_width
        step = kw + vw
        if len(payload) != count * step:
            raise CorruptionError("identity payload length mismatch")
        entries = []
        pos = 0
        for _ in range(count):
            k = int.from_bytes(payload[pos:pos + kw], "little")
            v = int.from_bytes(payload[pos + kw:pos + step], "little") if vw else None
            entries.append((k, v))
            pos += step
        return entries


class DeltaCodec(EncodingScheme):
    name = "delta"
    caches_bounds = True

    def __init__(self, key_width=8, value_width=8):
        self.key_width = key_width
        self.value_width = value_width

    def _check_keys(self, entries):
        prev = -1
        for k, _ in entries:
            if not isinstance(k, int) or isinstance(k, bool):
                raise CodecError("delta codec requires integer keys")
            if k < 0:
                raise CodecError("delta codec requires nonnegative keys")
            if k <= prev:
                raise CodecError("delta codec requires strictly increasing keys")
            prev = k

    def encoded_size(self, entries):
        self._check_keys(entries)
        if not entries:
            return 0
        size = self.key_width
        prev = entries[0][0]
        for k, _ in entries[1:]:
            size += varint_len(k - prev)
            prev = k
        return size + self.value_width * len(entries)

    def encode(self, entries):
        self._check_keys(entries)
        if not entries:
            return b""
        kw, vw = self.key_width, self.value_width
        first = entries[0][0]
        _check_uint(first, kw, "first key")
        out = bytearray(first.to_bytes(kw, "little"))
        prev = first
        for k, _ in entries[1:]:
            write_varint(k - prev, out)
            prev = k
        if vw:
            for _, v in entries:
                _check_uint(v, vw, "value")
                out += v.to_bytes(vw, "little")
        return bytes(out)

    def decode(self, payload, count):
        if count == 0:
            if payload:
                raise CorruptionError("nonempty payload for empty block")
            return []
        kw, vw = self.key_width, self.value_width
        if len(payload) < kw:
            raise CorruptionError("truncated first key")
        keys = [int.from_bytes(payload[:kw], "little")]
        pos = kw
        for _ in range(count - 1):
            gap, pos = read_varint(payload, pos)
            if gap == 0:
                raise CorruptionError("zero gap in delta block")
            keys.append(keys[-1] + gap)
        if vw:
            need = pos + vw * count
            if len(payload) != need:
                raise CorruptionError("delta payload length mismatch")
            values = [int.from_bytes(payload[pos + i * vw:pos + (i + 1) * vw], "little")
                      for i in range(count)]
        else:
            if len(payload) != pos:
                raise CorruptionError("delta payload length mismatch")
            values = [None] * count
        return list(zip(keys, values))


class ObjectCodec(EncodingScheme):
    """Stores entries as a tuple; for payloads that are not byte-packable."""

    name = "object"
    byte_oriented = False
    # Pointer-model estimate: one key word plus one value word per entry.
    NOMINAL_ENTRY_BYTES = 16

    def encoded_size(self, entries):
        return len(entries) * self.NOMINAL_ENTRY_BYTES

    def encode(self, entries):
        return tuple(entries)

    def decode(self, payload, count):
        if len(payload) != count:
            raise CorruptionError("object payload count mismatch")
        return list(payload)


def make_codec(spec, value_width=8):
    """Resolve a codec argument: an instance, or 'identity' / 'delta' / 'object'."""
    if isinstance(spec, EncodingScheme):
        return spec
    if spec in (None, "object"):
        return ObjectCodec()
    if spec == "identity":
        return IdentityCodec(value_width=value_width)
    if spec in ("delta", "diff"):
        return DeltaCodec(value_width=value_width)
    raise ValueError(f"unknown encoding {spec!r}")
