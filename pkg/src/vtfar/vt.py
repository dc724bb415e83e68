"""Varshamov-Tenengolts codebooks with modulus 2m+1 and their single-error correctors.

A word w of length m belongs to VT_a(m) when sum(i * w_i) = a (mod 2m+1).
Codebooks are never stored in full: sizes, ranking and unranking come from a
residue-count table, so encoding works for block lengths far beyond what could
be enumerated.
"""
from __future__ import annotations

from functools import cached_property, lru_cache
from operator import mul
from typing import Iterator, Sequence

from .bitword import ERASURE, Word
from .errors import BudgetExceeded, CorrectionError

MAX_BLOCK_LENGTH = 4096
MATERIALIZE_BITS = 24


def checksum(w: Sequence[int], modulus: int) -> int:
    """Weighted sum of ``w`` mod ``modulus``, skipping at most one erased position."""
    if ERASURE in w:
        erased = [i for i, s in enumerate(w) if s == ERASURE]
        if len(erased) > 1:
            raise CorrectionError(f"{len(erased)} erasures in one block")
        u = erased[0]
        w = list(w)
        w[u] = 0
    return sum(map(mul, range(1, len(w) + 1), w)) % modulus


def checksum_difference(block: Sequence[int], a: int, modulus: int) -> int:
    return (checksum(block, modulus) - a) % modulus


@lru_cache(maxsize=256)
def _suffix_counts(m: int) -> tuple[tuple[int, ...], ...]:
    """counts[p][r] = number of bit strings on positions p..m whose weighted sum is r mod 2m+1."""
    M = 2 * m + 1
    counts = [None] * (m + 2)
    counts[m + 1] = tuple(1 if r == 0 else 0 for r in range(M))
    for p in range(m, 0, -1):
        nxt = counts[p + 1]
        counts[p] = tuple(nxt[r] + nxt[(r - p) % M] for r in range(M))
    return tuple(counts)


def residue_sizes(m: int) -> tuple[int, ...]:
    """|VT_a(m)| for every residue a."""
    return _suffix_counts(m)[1]


class VTCodebook:
    """VT_a(m), optionally without the two constant words, in lexicographic order."""

    def __init__(self, m: int, a: int, exclude_constant: bool = False):
        if not 2 <= m <= MAX_BLOCK_LENGTH:
            raise BudgetExceeded(f"block length {m} outside 2..{MAX_BLOCK_LENGTH}")
        self.m = m
        self.modulus = 2 * m + 1
        if not 0 <= a < self.modulus:
            raise ValueError(f"residue {a} outside 0..{self.modulus - 1}")
        self.a = a
        self.exclude_constant = exclude_constant
        self._has_zero = a == 0
        self._has_ones = (m * (m + 1) // 2) % self.modulus == a

    def __repr__(self) -> str:
        return (f"VTCodebook(m={self.m}, a={self.a}, modulus={self.modulus}, "
                f"excluded={self.exclude_constant}, size={len(self)})")

    @cached_property
    def size(self) -> int:
        n = residue_sizes(self.m)[self.a]
        if self.exclude_constant:
            n -= self._has_zero + self._has_ones
        return n

    def __len__(self) -> int:
        return self.size

    def __contains__(self, w) -> bool:
        if len(w) != self.m or any(b not in (0, 1) for b in w):
            return False
        if self.exclude_constant and (self._has_zero or self._has_ones):
            s = sum(w)
            if s == 0 or s == self.m:
                return False
        return sum(map(mul, range(1, self.m + 1), w)) % self.modulus == self.a

    def unrank(self, index: int) -> Word:
        """The ``index``-th codeword in lexicographic order."""
        return Word(self.unrank_bits(index))

    def unrank_bits(self, index: int) -> list[int]:
        if not 0 <= index < self.size:
            raise IndexError(f"codeword index {index} outside 0..{self.size - 1}")
        if self.exclude_constant and self._has_zero:
            index += 1
        counts = _suffix_counts(self.m)
        M = self.modulus
        need = self.a
        bits = []
        for p in range(1, self.m + 1):
            zero_branch = counts[p + 1][need]
            if index < zero_branch:
                bits.append(0)
            else:
                index -= zero_branch
                bits.append(1)
                need = (need - p) % M
        return bits

    def rank(self, w: Sequence[int]) -> int:
        if w not in self:
            raise KeyError(f"{''.join(map(str, w))} is not a codeword of {self!r}")
        counts = _suffix_counts(self.m)
        M = self.modulus
        need = self.a
        index = 0
        for p, b in enumerate(w, 1):
            if b:
                index += counts[p + 1][need]
                need = (need - p) % M
        if self.exclude_constant and self._has_zero:
            index -= 1
        return index

    def __iter__(self) -> Iterator[Word]:
        yield from self.codewords

    @cached_property
    def codewords(self) -> tuple[Word, ...]:
        if self.m > MATERIALIZE_BITS:
            raise BudgetExceeded(f"refusing to materialize 2^{self.m} candidate words")
        counts = _suffix_counts(self.m)
        M, m = self.modulus, self.m
        out = []
        prefix = []

        def walk(p, need):
            if p > m:
                out.append(Word(prefix))
                return
            for b in (0, 1):
                nxt = (need - p * b) % M
                if counts[p + 1][nxt]:
                    prefix.append(b)
                    walk(p + 1, nxt)
                    prefix.pop()

        walk(1, self.a)
        if self.exclude_constant:
            out = [w for w in out if 0 < sum(w) < m]
        return tuple(out)

    def dump(self) -> str:
        """Header line followed by one codeword per line."""
        lines = [f"m={self.m} a={self.a} modulus={self.modulus} "
                 f"excluded={str(self.exclude_constant).lower()}"]
        lines.extend(str(w) for w in self.codewords)
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "VTCodebook":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        fields = dict(kv.split("=", 1) for kv in lines[0].split())
        book = cls(int(fields["m"]), int(fields["a"]), fields["excluded"] == "true")
        if int(fields["modulus"]) != book.modulus:
            raise ValueError("modulus in header does not equal 2m+1")
        words = tuple(Word.parse(ln) for ln in lines[1:])
        if words != book.codewords:
            raise ValueError("codeword list does not match the header parameters")
        return book


def build_codebook(m: int, a: int, exclude_constant: bool = False) -> VTCodebook:
    return VTCodebook(m, a, exclude_constant)


def best_residue(m: int, exclude_constant: bool = False) -> tuple[int, VTCodebook]:
    """Residue with the largest codebook; smallest residue wins ties."""
    sizes = list(residue_sizes(m))
    M = 2 * m + 1
    if exclude_constant:
        sizes[0] -= 1
        sizes[(m * (m + 1) // 2) % M] -= 1
    best = max(range(M), key=lambda a: (sizes[a], -a))
    return best, VTCodebook(m, best, exclude_constant)


def correct_deletion(y: Sequence[int], book: VTCodebook) -> Word:
    """Restore the single bit deleted from a codeword of ``book``."""
    cands = deletion_candidates(y, book.a, book.modulus, book.exclude_constant)
    if not cands:
        raise CorrectionError("no single insertion yields a codeword")
    if len(cands) > 1:
        raise AssertionError(f"ambiguous deletion correction {cands}: codebook is not single-deletion correcting")
    return Word(cands[0])


def deletion_candidates(y, a, modulus, exclude_constant=False):
    """All distinct codewords obtained by inserting one bit into ``y``.

    Inserting b before index p (0-based) shifts every later bit one place
    right, so the checksum becomes CS(y) + (p+1)*b + weight(y[p:]).
    """
    m = len(y) + 1
    base = sum(map(mul, range(1, m), y))
    weight = tail = sum(y)
    found = []
    for p in range(m):
        for b in (0, 1):
            if (base + (p + 1) * b + tail - a) % modulus == 0:
                w = list(y[:p]) + [b] + list(y[p:])
                if exclude_constant and (weight + b == 0 or weight + b == m):
                    continue
                if w not in found:
                    found.append(w)
        if p < m - 1:
            tail -= y[p]
    return found


def correct_erasure(y: Sequence[int], a: int, modulus: int) -> Word:
    erased = [i for i, s in enumerate(y) if s == ERASURE]
    if len(erased) != 1:
        raise CorrectionError(f"expected exactly one erasure, found {len(erased)}")
    u = erased[0]
    out = list(y)
    out[u] = 0 if (a - checksum(y, modulus)) % modulus == 0 else 1
    return Word(out)


def correct_substitution(y: Sequence[int], a: int, modulus: int) -> Word:
    """Undo at most one flipped bit using the checksum difference alone."""
    m = len(y)
    D = (checksum(y, modulus) - a) % modulus
    if D == 0:
        return Word(y)
    out = list(y)
    if D <= m:
        # a 0 at position D was received as 1
        if out[D - 1] != 1:
            raise CorrectionError(f"difference {D} points at a 0 bit")
        out[D - 1] = 0
    else:
        u = modulus - D
        if u > m or out[u - 1] != 0:
            raise CorrectionError(f"difference {D} points at a 1 bit")
        out[u - 1] = 1
    return Word(out)
