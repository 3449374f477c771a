"""Binary model files.

Layout (all integers little-endian)::

    magic     4 bytes  b"BTHW"
    version   u16      FORMAT_VERSION
    state     u8       0 = counting, 1 = binarized
    reserved  u8       0
    then six blocks, each a u32 byte length followed by its body:
      config       u64 x 7 (features, classes, bits/input, inputs/filter,
                   entries/filter, hashes/filter, seed) + u32 bleach (0 = unset)
      thresholds   float64 x (features * bits/input), row-major
      mapping      u32 x padded input bits (the permutation)
      hash params  u32 x (hashes * inputs/filter), row-major
      labels       u32 count, then count x (u32 length + UTF-8 bytes)
      payload      binarized: classes*filters*entries bits packed LSB-first;
                   counting: u32 per entry in (class, filter, entry) order
"""
import struct
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .encoding import ThermometerEncoder
from .hashing import H3HashFamily
from .model import BthowenModel, InputMapping, ModelConfig

MAGIC = b"BTHW"
FORMAT_VERSION = 1
_PREAMBLE = struct.Struct("<4sHBB")
_CONFIG = struct.Struct("<7QI")


class ModelFormatError(ValueError):
    pass


def format_kib(bits: int) -> str:
    """KiB to three significant figures, halves rounded up (2.625 -> '2.63')."""
    value = Decimal(bits) / Decimal(8192)
    if value == 0:
        return "0"
    exponent = value.adjusted() - 2
    return format(value.quantize(Decimal(1).scaleb(exponent), rounding=ROUND_HALF_UP), "f")


def payload_nbytes(config: ModelConfig, binarized: bool) -> int:
    if binarized:
        return -(-config.payload_bits // 8)
    return config.payload_bits * 4


def _block(body: bytes) -> bytes:
    return struct.pack("<I", len(body)) + body


def to_bytes(model: BthowenModel) -> bytes:
    c = model.config
    config = _CONFIG.pack(c.feature_count, c.class_count, c.bits_per_input, c.inputs_per_filter,
                          c.entries_per_filter, c.hashes_per_filter, c.seed, model.bleach or 0)
    names = model.label_names or []
    labels = struct.pack("<I", len(names)) + b"".join(
        struct.pack("<I", len(e)) + e for e in (n.encode("utf-8") for n in names))
    if model.binarized:
        payload = np.packbits(model.table.ravel(), bitorder="little").tobytes()
    else:
        payload = model.table.astype("<u4").tobytes()
    return b"".join([
        _PREAMBLE.pack(MAGIC, FORMAT_VERSION, int(model.binarized), 0),
        _block(config),
        _block(model.encoder.thresholds.astype("<f8").tobytes()),
        _block(model.mapping.permutation.astype("<u4").tobytes()),
        _block(model.family.params.astype("<u4").tobytes()),
        _block(labels),
        _block(payload),
    ])


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError(f"truncated model file while reading {what}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def block(self, what: str, expected=None) -> bytes:
        (n,) = struct.unpack("<I", self.take(4, what))
        if expected is not None and n != expected:
            raise ModelFormatError(f"{what} block is {n} bytes, config implies {expected}")
        return self.take(n, what)


def from_bytes(data: bytes) -> BthowenModel:
    r = _Reader(data)
    magic, version, state, _ = _PREAMBLE.unpack(r.take(_PREAMBLE.size, "header"))
    if magic != MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}, not a BTHW model file")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    if state not in (0, 1):
        raise ModelFormatError(f"unknown model state {state}")
    binarized = state == 1
    f, m, t, n, entries, k, seed, bleach = _CONFIG.unpack(r.block("config", _CONFIG.size))
    try:
        config = ModelConfig(f, m, t, n, entries, k, seed)
    except ValueError as e:
        raise ModelFormatError(f"invalid config: {e}") from None
    thresholds = np.frombuffer(r.block("thresholds", f * t * 8), dtype="<f8").reshape(f, t)
    perm = np.frombuffer(r.block("mapping", config.padded_bits * 4), dtype="<u4")
    params = np.frombuffer(r.block("hash params", k * n * 4), dtype="<u4").reshape(k, n)
    lr = _Reader(r.block("labels"))
    (count,) = struct.unpack("<I", lr.take(4, "label count"))
    names = []
    for _ in range(count):
        (ln,) = struct.unpack("<I", lr.take(4, "label length"))
        names.append(lr.take(ln, "label").decode("utf-8"))
    raw = r.block("payload", payload_nbytes(config, binarized))
    if r.pos != len(data):
        raise ModelFormatError(f"{len(data) - r.pos} trailing bytes after payload")
    shape = (m, config.filters_per_discriminator, entries)
    if binarized:
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), count=config.payload_bits, bitorder="little")
        table = bits.astype(bool).reshape(shape)
    else:
        table = np.frombuffer(raw, dtype="<u4").astype(np.uint32).reshape(shape)
    try:
        return BthowenModel(config, ThermometerEncoder(thresholds.copy()),
                            InputMapping(perm.astype(np.int64), config.padded_bits - config.encoded_bits),
                            H3HashFamily(params, config.address_bits), table, bleach or None, names or None)
    except ValueError as e:
        raise ModelFormatError(str(e)) from None


def save(model: BthowenModel, path) -> None:
    Path(path).write_bytes(to_bytes(model))


def load(path) -> BthowenModel:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise ModelFormatError(f"cannot read {path}: {e.strerror}") from e
    return from_bytes(data)


def describe(model: BthowenModel) -> str:
    """Human-readable dump of a model's header, config and sizes."""
    c = model.config
    total = len(to_bytes(model))
    payload = payload_nbytes(c, model.binarized)
    lines = [
        f"format=BTHW v{FORMAT_VERSION}",
        f"state={'binarized' if model.binarized else 'counting'}",
        f"features={c.feature_count}, classes={c.class_count}, bits_per_input={c.bits_per_input}",
        f"inputs_per_filter={c.inputs_per_filter}, filters_per_discriminator={c.filters_per_discriminator}, "
        f"padding={model.mapping.padding}",
        f"entries_per_filter={c.entries_per_filter}, hashes={c.hashes_per_filter}, "
        f"b={model.bleach if model.bleach is not None else 'unset'}",
        f"seed={c.seed}",
        f"size={format_kib(c.payload_bits)} KiB ({c.payload_bits} filter bits, binarized)",
        f"file_bytes={total} (payload {payload}, overhead {total - payload})",
    ]
    if model.label_names:
        lines.append("labels=" + ",".join(model.label_names))
    return "\n".join(lines)
