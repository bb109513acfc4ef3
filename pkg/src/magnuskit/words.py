"""Freely reduced words over a fixed-rank generating set.

Letters are nonzero signed integers: ``i`` stands for the i-th generator
and ``-i`` for its inverse.  Every constructor reduces adjacent inverse
pairs, so a word is always in normal form and two words represent the same
free-group element iff their letter tuples are equal.  The empty word is
the identity.
"""

import random
import re


def reduce_letters(letters, rank: int) -> tuple:
    """Freely reduce a raw letter sequence, validating the index range."""
    out = []
    for let in letters:
        let = int(let)
        if let == 0 or abs(let) > rank:
            raise ValueError(f"letter {let} out of range for rank {rank}")
        if out and out[-1] == -let:
            out.pop()
        else:
            out.append(let)
    return tuple(out)


class FreeWord:
    """A freely reduced word in the free group of the given rank."""

    __slots__ = ("rank", "letters")

    def __init__(self, rank: int, letters=(), *, _reduced: bool = False):
        if rank < 1:
            raise ValueError(f"rank must be positive, got {rank}")
        self.rank = rank
        self.letters = tuple(letters) if _reduced else reduce_letters(letters, rank)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return (
            isinstance(other, FreeWord)
            and self.rank == other.rank
            and self.letters == other.letters
        )

    def __hash__(self):
        return hash((self.rank, self.letters))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if not isinstance(other, FreeWord):
            return NotImplemented
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")
        head = list(self.letters)
        tail = other.letters
        i = 0
        while head and i < len(tail) and head[-1] == -tail[i]:
            head.pop()
            i += 1
        w = FreeWord.__new__(FreeWord)
        w.rank = self.rank
        w.letters = tuple(head) + tail[i:]
        return w

    def inverse(self) -> "FreeWord":
        w = FreeWord.__new__(FreeWord)
        w.rank = self.rank
        w.letters = tuple(-let for let in reversed(self.letters))
        return w

    def power(self, k: int) -> "FreeWord":
        base = self if k >= 0 else self.inverse()
        out = identity(self.rank)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __repr__(self):
        return f"FreeWord({self.rank}, {to_text(self) or 'e'!r})"


def identity(rank: int) -> FreeWord:
    return FreeWord(rank, (), _reduced=True)


def gen(rank: int, i: int) -> FreeWord:
    """The i-th generator (or its inverse for negative i)."""
    if i == 0 or abs(i) > rank:
        raise ValueError(f"generator index {i} out of range for rank {rank}")
    return FreeWord(rank, (i,), _reduced=True)


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    """[u, v] = u v u^-1 v^-1."""
    return u * v * u.inverse() * v.inverse()


def random_word(rank: int, length: int, rng: random.Random) -> FreeWord:
    """Uniform letters followed by reduction; seed-deterministic."""
    signed = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    return FreeWord(rank, [rng.choice(signed) for _ in range(length)])


def nested_commutator_sample(
    rank: int, depth: int, rng: random.Random, base_length: int = 2
) -> FreeWord:
    """A (possibly trivial) word in the depth-th derived subgroup.

    Depth 1 returns [u, v] for random words u, v; depth d pairs two
    independent depth-(d-1) samples.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth == 1:
        return commutator(
            random_word(rank, base_length, rng), random_word(rank, base_length, rng)
        )
    return commutator(
        nested_commutator_sample(rank, depth - 1, rng, base_length),
        nested_commutator_sample(rank, depth - 1, rng, base_length),
    )


def abelianized(w: FreeWord) -> tuple:
    """Exponent-sum vector of the word; the image in Z^rank."""
    vec = [0] * w.rank
    for let in w.letters:
        vec[abs(let) - 1] += 1 if let > 0 else -1
    return tuple(vec)


# -- text and JSON forms ----------------------------------------------------

_TOKEN = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


def parse_text(text: str, rank: int) -> FreeWord:
    """Parse the spaced text form, e.g. ``x1 x2^-1 x1`` or ``x1^3``."""
    letters = []
    for token in text.split():
        m = _TOKEN.match(token)
        if not m:
            raise ValueError(f"bad word token {token!r}")
        idx = int(m.group(1))
        exp = int(m.group(2)) if m.group(2) else 1
        if idx < 1 or idx > rank:
            raise ValueError(f"generator x{idx} out of range for rank {rank}")
        letters.extend([idx if exp > 0 else -idx] * abs(exp))
    return FreeWord(rank, letters)


def to_text(w: FreeWord) -> str:
    """Emit the spaced text form, collapsing runs into exponents."""
    parts = []
    run_letter, run_len = None, 0
    for let in list(w.letters) + [None]:
        if let == run_letter:
            run_len += 1
            continue
        if run_letter is not None:
            idx, sign = abs(run_letter), (1 if run_letter > 0 else -1)
            exp = sign * run_len
            parts.append(f"x{idx}" if exp == 1 else f"x{idx}^{exp}")
        run_letter, run_len = let, 1
    return " ".join(parts)


def to_json(w: FreeWord) -> list:
    return list(w.letters)


def from_json(data, rank: int) -> FreeWord:
    if not isinstance(data, (list, tuple)):
        raise ValueError("word JSON must be an array of signed indices")
    return FreeWord(rank, data)
