"""Words, received symbol sequences and deletable error patterns.

Positions are 1-based throughout. Erased symbols are stored as the
integer 2 (``ERASURE``) so that received words stay plain int tuples.
"""
from __future__ import annotations

import enum
import functools
import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded

ERASURE = 2
DEFAULT_ENUM_BUDGET = 10**7


class Symbol(enum.IntEnum):
    ZERO = 0
    ONE = 1
    ERASURE = ERASURE


class ErrorType(enum.Enum):
    DELETION = "D"
    ERASURE = "E"
    SUBSTITUTION = "F"

    def __str__(self) -> str:
        return self.value


ERROR_TYPES = (ErrorType.DELETION, ErrorType.ERASURE, ErrorType.SUBSTITUTION)
_SYMBOL_CHARS = {"0": 0, "1": 1, "e": ERASURE}
_CHAR_OF = {0: "0", 1: "1", ERASURE: "e"}
_BITS = frozenset((0, 1))
_SYMBOLS = frozenset((0, 1, ERASURE))


class Word(tuple):
    """Immutable binary word."""

    def __new__(cls, bits: Iterable[int] = ()):
        self = super().__new__(cls, bits)
        if not _BITS.issuperset(self):
            i, b = next((i, b) for i, b in enumerate(self, 1) if b not in _BITS)
            raise ValueError(f"bit at position {i} is {b!r}, expected 0 or 1")
        if not self:
            raise ValueError("a word needs at least one bit")
        return self

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        for i, c in enumerate(text, 1):
            if c not in "01":
                raise ValueError(f"invalid bit {c!r} at position {i}")
        return cls(int(c) for c in text)

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self)

    def __repr__(self) -> str:
        return f"Word('{self}')"


class ReceivedWord(tuple):
    """Channel output over {0, 1, erasure}; may be shorter than the source."""

    def __new__(cls, symbols: Iterable[int] = ()):
        self = super().__new__(cls, symbols)
        if not _SYMBOLS.issuperset(self):
            i, s = next((i, s) for i, s in enumerate(self, 1) if s not in _SYMBOLS)
            raise ValueError(f"symbol at position {i} is {s!r}")
        return self

    @classmethod
    def parse(cls, text: str) -> "ReceivedWord":
        text = text.strip()
        out = []
        for i, c in enumerate(text, 1):
            try:
                out.append(_SYMBOL_CHARS[c.lower()])
            except KeyError:
                raise ValueError(f"invalid symbol {c!r} at position {i}") from None
        return cls(out)

    @property
    def erasures(self) -> int:
        return self.count(ERASURE)

    def __str__(self) -> str:
        return "".join(_CHAR_OF[s] for s in self)

    def __repr__(self) -> str:
        return f"ReceivedWord('{self}')"


@dataclass(frozen=True)
class ErrorPattern:
    """Sparse deletable error pattern: only the corrupted positions are stored."""

    n: int
    entries: tuple[tuple[int, ErrorType], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("pattern length must be positive")
        entries = tuple((int(p), ErrorType(k)) for p, k in self.entries)
        last = 0
        for pos, _ in entries:
            if pos <= last:
                raise ValueError("pattern positions must be strictly increasing")
            if pos > self.n:
                raise ValueError(f"position {pos} exceeds pattern length {self.n}")
            last = pos
        object.__setattr__(self, "entries", entries)

    @classmethod
    def parse(cls, text: str, n: int) -> "ErrorPattern":
        """Parse ``1F,3D,4F,5E``. An empty string or ``-`` is the clean pattern."""
        text = text.strip()
        if text in ("", "-"):
            return cls(n)
        entries = []
        for i, tok in enumerate(text.split(","), 1):
            tok = tok.strip()
            if len(tok) < 2 or not tok[:-1].isdigit() or tok[-1].upper() not in "DEF":
                raise ValueError(f"malformed pattern token {tok!r} (token {i})")
            entries.append((int(tok[:-1]), ErrorType(tok[-1].upper())))
        entries.sort(key=lambda e: e[0])
        return cls(n, tuple(entries))

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    @property
    def deletions(self) -> int:
        return sum(1 for _, k in self.entries if k is ErrorType.DELETION)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return ",".join(f"{p}{k.value}" for p, k in self.entries)


def apply_pattern(x: Sequence[int], g: ErrorPattern) -> ReceivedWord:
    if len(x) != g.n:
        raise ValueError(f"word length {len(x)} does not match pattern length {g.n}")
    return ReceivedWord(_corrupt(x, g.entries, len(x)))


def apply_pattern_prefix(x: Sequence[int], g: ErrorPattern, t: int) -> ReceivedWord:
    """Corrupt only the first ``t`` bits of ``x``; a deletion among them shortens the output."""
    if len(x) != g.n:
        raise ValueError(f"word length {len(x)} does not match pattern length {g.n}")
    if not 1 <= t <= len(x):
        raise ValueError(f"prefix length {t} outside 1..{len(x)}")
    return ReceivedWord(_corrupt(x, g.entries, t))


def _corrupt(x, entries, t):
    out = list(x[:t])
    # right to left so earlier indices stay valid after deletions
    for pos, kind in reversed(entries):
        if pos > t:
            continue
        i = pos - 1
        if kind is ErrorType.DELETION:
            del out[i]
        elif kind is ErrorType.ERASURE:
            out[i] = ERASURE
        else:
            out[i] = 1 - out[i]
    return out


def is_far(g: ErrorPattern, Q: int) -> bool:
    pos = g.positions
    return all(b - a >= Q for a, b in zip(pos, pos[1:]))


def count_patterns(n: int, t: int) -> int:
    """Size of E_n(t): patterns with at most ``t`` corrupted positions."""
    return sum(_pattern_terms(n, t))


def count_far_patterns(n: int, Q: int, t: int | None = None) -> int:
    """Number of Q-far patterns with at most ``t`` errors (all of them if ``t`` is None)."""
    return sum(_far_terms(n, Q, t))


@functools.lru_cache(maxsize=64)
def _far_terms(n, Q, t):
    # gap substitution q_i = p_i - (i-1)(Q-1) maps Q-far supports onto plain k-subsets
    terms = []
    limit = n if t is None else min(t, n)
    for k in range(limit + 1):
        span = n - max(k - 1, 0) * (max(Q, 1) - 1)
        if span < k:
            break
        terms.append(math.comb(span, k) * 3**k)
    return tuple(terms)


def _rng(seed, rng):
    if rng is not None:
        return rng
    return random.Random(seed)


def sample_pattern(n: int, t: int, seed: int | None = None,
                   rng: random.Random | None = None) -> ErrorPattern:
    """Uniform draw from E_n(t)."""
    if not 0 <= t <= n:
        raise ValueError(f"error count bound {t} outside 0..{n}")
    r = _rng(seed, rng)
    k = _pick(_pattern_terms(n, t), r)
    positions = sorted(r.sample(range(1, n + 1), k))
    return ErrorPattern(n, tuple((p, r.choice(ERROR_TYPES)) for p in positions))


def sample_far_pattern(n: int, Q: int, t: int | None = None, seed: int | None = None,
                       rng: random.Random | None = None) -> ErrorPattern:
    """Uniform draw from the Q-far patterns with at most ``t`` errors."""
    r = _rng(seed, rng)
    k = _pick(_far_terms(n, Q, t), r)
    span = n - max(k - 1, 0) * (Q - 1)
    base = sorted(r.sample(range(1, span + 1), k))
    positions = [p + i * (Q - 1) for i, p in enumerate(base)]
    return ErrorPattern(n, tuple((p, r.choice(ERROR_TYPES)) for p in positions))


@functools.lru_cache(maxsize=64)
def _pattern_terms(n, t):
    return tuple(math.comb(n, k) * 3**k for k in range(min(t, n) + 1))


def _pick(weights, r):
    u = r.randrange(sum(weights))
    for k, w in enumerate(weights):
        if u < w:
            return k
        u -= w
    raise AssertionError("unreachable")


def enumerate_patterns(n: int, t: int, budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[ErrorPattern]:
    """Every element of E_n(t) exactly once, ordered by error count."""
    total = count_patterns(n, t)
    if total > budget:
        raise BudgetExceeded(f"E_{n}({t}) has {total} patterns, budget is {budget}")
    for k in range(min(t, n) + 1):
        for positions in itertools.combinations(range(1, n + 1), k):
            for kinds in itertools.product(ERROR_TYPES, repeat=k):
                yield ErrorPattern(n, tuple(zip(positions, kinds)))


def enumerate_far_patterns(n: int, Q: int, t: int | None = None,
                           budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[ErrorPattern]:
    """Every Q-far pattern with at most ``t`` errors, generated directly (no filtering)."""
    total = count_far_patterns(n, Q, t)
    if total > budget:
        raise BudgetExceeded(f"{total} far patterns exceed budget {budget}")
    for k, _ in enumerate(_far_terms(n, Q, t)):
        span = n - max(k - 1, 0) * (Q - 1)
        for base in itertools.combinations(range(1, span + 1), k):
            positions = [p + i * (Q - 1) for i, p in enumerate(base)]
            for kinds in itertools.product(ERROR_TYPES, repeat=k):
                yield ErrorPattern(n, tuple(zip(positions, kinds)))
