"""Named deterministic random streams.

Counter-based generator (splitmix64 finalizer over key + counter * gamma),
so every stream is fully determined by (seed, name) and streams never
perturb each other: adding a stream, or drawing from one, has no effect on
any other. Substreams keyed by integers/strings give pre-assignable draws,
e.g. one pair of uniforms per (tick, robot) independent of iteration order.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: avalanching 64-bit mix."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash, used for stream names and log checksums."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK64
    return h


def _tag_key(tag) -> int:
    if isinstance(tag, int):
        return mix64(tag & MASK64)
    if isinstance(tag, str):
        return fnv1a64(tag.encode("utf-8"))
    raise TypeError(f"stream tag must be int or str, got {type(tag).__name__}")


class RandomStream:
    """One deterministic stream: draw i is mix64(key + (i+1)*gamma)."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int, counter: int = 0):
        self.key = key & MASK64
        self.counter = counter

    @classmethod
    def from_seed(cls, seed: int, name: str) -> "RandomStream":
        return cls(mix64((seed & MASK64) ^ fnv1a64(name.encode("utf-8"))))

    def clone(self) -> "RandomStream":
        return RandomStream(self.key, self.counter)

    def at(self, *tags) -> "RandomStream":
        """Derived substream; does not advance this stream."""
        key = self.key
        for tag in tags:
            key = mix64(key ^ _tag_key(tag))
        return RandomStream(key)

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.key + self.counter * _GAMMA)

    def u01(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n). Lemire multiply-shift reduction."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return (self.next_u64() * n) >> 64

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.u01()

    def choice(self, seq):
        if not seq:
            raise ValueError("choice from empty sequence")
        return seq[self.randrange(len(seq))]

    def sample(self, seq, k: int) -> list:
        """k distinct elements, order random (partial Fisher-Yates)."""
        pool = list(seq)
        if k > len(pool):
            raise ValueError(f"sample size {k} exceeds population {len(pool)}")
        for i in range(k):
            j = i + self.randrange(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]


def session_streams(seed: int, names=("world", "swarm", "hazards", "pauses",
                                      "policy", "respondent")) -> dict:
    """Independent named streams for one session, all derived from one seed."""
    return {name: RandomStream.from_seed(seed, name) for name in names}
