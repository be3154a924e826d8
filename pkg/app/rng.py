"""
Counter-based random streams.

Every stream is keyed by (master_seed, stream_id) and positioned by a
counter, so the draws a walker sees depend only on that triple and never on
how replicates are scheduled across workers.
"""

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1

# Largest geometric value returned; a uniform draw is never below 2**-64
GEOMETRIC_CAP = 64


def derive_stream_id(*parts: object) -> int:
    """
    Hash an identifying tuple down to a 64-bit stream id.

    Typical parts are (experiment id, walker index, replicate index).
    """
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class RngStream:
    """Deterministic, splittable random stream backed by Philox."""

    def __init__(self, master_seed: int, stream_id: int, counter: int = 0) -> None:
        for name, value in (
            ("master_seed", master_seed),
            ("stream_id", stream_id),
            ("counter", counter),
        ):
            if not 0 <= value <= MASK64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")

        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        self.start_counter = int(counter)
        bit_generator = np.random.Philox(
            key=(self.stream_id << 64) | self.master_seed,
            counter=self.start_counter,
        )
        self._generator = np.random.Generator(bit_generator)

    def __repr__(self) -> str:
        return (
            f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id}, "
            f"counter={self.counter})"
        )

    @classmethod
    def for_walker(
        cls,
        master_seed: int,
        experiment: str,
        walker: int,
        replicate: int,
    ) -> "RngStream":
        """Stream for one walker of one replicate of an experiment."""
        return cls(master_seed, derive_stream_id(experiment, walker, replicate))

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator (advances with every draw)."""
        return self._generator

    @property
    def counter(self) -> int:
        """Current Philox block counter (low 64 bits)."""
        state = self._generator.bit_generator.state
        return int(state["state"]["counter"][0])

    def substream(self, tag: object) -> "RngStream":
        """Independent stream derived from this stream's identity and a tag."""
        return RngStream(self.master_seed, derive_stream_id(self.stream_id, tag))

    def uniform(self, size: int | None = None) -> float | np.ndarray:
        """Uniform draws on [0, 1)."""
        return self._generator.random(size)

    def integers(self, high: int, size: int | None = None) -> int | np.ndarray:
        """Uniform integers on [0, high)."""
        return self._generator.integers(0, high, size=size)

    def signs(self, size: int) -> np.ndarray:
        """Array of independent fair +1/-1 steps."""
        return 1 - 2 * self._generator.integers(0, 2, size=size, dtype=np.int64)


def sample_geometric(rng: RngStream) -> int:
    """
    Draw G with P(G = k) = 2^(-k-1), k = 0, 1, 2, ...

    Inverse CDF on a single uniform: for u in (0, 1], k = floor(-log2 u).
    """
    u = 1.0 - float(rng.uniform())
    return min(int(np.floor(-np.log2(u))), GEOMETRIC_CAP)


def sample_geometric_array(rng: RngStream, size: int | tuple[int, ...]) -> np.ndarray:
    """Vectorized sample_geometric."""
    u = 1.0 - rng.generator.random(size)
    k = np.floor(-np.log2(u)).astype(np.int64)
    return np.minimum(k, GEOMETRIC_CAP)
