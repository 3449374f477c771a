"""H3 universal hashing: XOR together the random parameters selected by set input bits."""
import numpy as np

MAX_OUTPUT_BITS = 30


class H3HashFamily:
    """``k`` H3 hash functions from ``input_bits`` bits to ``output_bits``-bit addresses.

    ``params[j, i]`` is the m-bit value contributed to hash ``j`` when input bit
    ``i`` is set.  Bit 0 is the first bit of a filter's input slice.
    """

    def __init__(self, params, output_bits: int):
        p = np.array(params, dtype=np.uint32, copy=True)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"params must have shape (k >= 1, n >= 1), got {p.shape}")
        if not 1 <= output_bits <= MAX_OUTPUT_BITS:
            raise ValueError(f"output_bits must be in [1, {MAX_OUTPUT_BITS}], got {output_bits}")
        if np.any(p >> output_bits):
            raise ValueError(f"every parameter must be < 2**{output_bits}")
        p.setflags(write=False)
        self.params = p
        self.output_bits = output_bits
        self._tables = self._byte_tables()

    @classmethod
    def sample(cls, rng: np.random.Generator, input_bits: int, output_bits: int, num_hashes: int):
        if input_bits < 1 or num_hashes < 1:
            raise ValueError("input_bits and num_hashes must be >= 1")
        if not 1 <= output_bits <= MAX_OUTPUT_BITS:
            raise ValueError(f"output_bits must be in [1, {MAX_OUTPUT_BITS}], got {output_bits}")
        params = rng.integers(0, 1 << output_bits, size=(num_hashes, input_bits), dtype=np.uint32)
        return cls(params, output_bits)

    @property
    def num_hashes(self) -> int:
        return self.params.shape[0]

    @property
    def input_bits(self) -> int:
        return self.params.shape[1]

    def __eq__(self, other):
        if not isinstance(other, H3HashFamily):
            return NotImplemented
        return self.output_bits == other.output_bits and np.array_equal(self.params, other.params)

    def __repr__(self):
        return f"H3HashFamily(n={self.input_bits}, m={self.output_bits}, k={self.num_hashes})"

    def hash(self, which: int, x) -> int:
        if not 0 <= which < self.num_hashes:
            raise IndexError(f"hash index {which} out of range for k={self.num_hashes}")
        bits = np.asarray(x)
        if bits.shape != (self.input_bits,):
            raise ValueError(f"expected {self.input_bits} input bits, got shape {bits.shape}")
        h = 0
        for bit, p in zip(bits, self.params[which]):
            if bit:
                h ^= int(p)
        return h

    def _byte_tables(self):
        # XOR-linearity: hash(x) is the XOR of per-byte partial hashes, so each
        # 8-bit chunk of the input can be resolved with one 256-entry lookup.
        k, n = self.params.shape
        chunks = (n + 7) // 8
        padded = np.zeros((k, chunks * 8), dtype=np.uint32)
        padded[:, :n] = self.params
        values = np.arange(256, dtype=np.uint32)
        tables = np.zeros((k, chunks, 256), dtype=np.uint32)
        for c in range(chunks):
            for i in range(8):
                on = ((values >> i) & 1).astype(bool)
                tables[:, c, on] ^= padded[:, c * 8 + i, None]
        return tables

    def hash_all(self, bits) -> np.ndarray:
        """Hash a batch of inputs with every function: (..., n) bits -> (..., k) addresses."""
        b = np.asarray(bits, dtype=np.uint8)
        if b.shape[-1] != self.input_bits:
            raise ValueError(f"expected {self.input_bits} input bits, got shape {b.shape}")
        packed = np.packbits(b, axis=-1, bitorder="little")
        out = np.zeros(b.shape[:-1] + (self.num_hashes,), dtype=np.uint32)
        for c in range(packed.shape[-1]):
            out ^= np.moveaxis(self._tables[:, c, packed[..., c]], 0, -1)
        return out
