"""Block codes built from t-1 interior VT blocks and one longer final block.

Messages are integers in [0, 2^K) mapped to codewords by a mixed-radix
expansion: block 1 is the most significant digit, so message order agrees with
lexicographic codeword order.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Sequence

from .bitword import Word
from .vt import VTCodebook, best_residue


@dataclass(frozen=True)
class FarCodeParams:
    n: int
    P: int
    t: int
    s: int
    a1: int
    a2: int

    def __post_init__(self):
        if self.P < 2:
            raise ValueError(f"block length P={self.P} must be at least 2")
        if self.t < 2:
            raise ValueError(f"n={self.n} gives {self.t} block(s); need n >= 2P")
        if self.n != self.t * self.P + self.s or not 0 <= self.s < self.P:
            raise ValueError("n, P, t, s are inconsistent")
        if not 0 <= self.a1 < self.M1:
            raise ValueError(f"a1={self.a1} outside 0..{self.M1 - 1}")
        if not 0 <= self.a2 < self.M2:
            raise ValueError(f"a2={self.a2} outside 0..{self.M2 - 1}")

    @property
    def M1(self) -> int:
        return 2 * self.P + 1

    @property
    def M2(self) -> int:
        return 2 * (self.P + self.s) + 1

    @property
    def final_length(self) -> int:
        return self.P + self.s


class FarCode:
    def __init__(self, params: FarCodeParams):
        self.params = params
        self.interior_book = VTCodebook(params.P, params.a1, exclude_constant=True)
        self.final_book = VTCodebook(params.final_length, params.a2)
        if self.q1 < 1:
            raise ValueError(f"interior codebook VT_{params.a1}({params.P}) is empty once constants are removed")
        if self.q2 < 1:
            raise ValueError(f"final codebook VT_{params.a2}({params.final_length}) is empty")

    def __repr__(self) -> str:
        p = self.params
        return f"FarCode(n={p.n}, P={p.P}, a1={p.a1}, a2={p.a2}, q1={self.q1}, q2={self.q2}, K={self.K})"

    @property
    def q1(self) -> int:
        return self.interior_book.size

    @property
    def q2(self) -> int:
        return self.final_book.size

    @cached_property
    def size(self) -> int:
        return self.q1 ** (self.params.t - 1) * self.q2

    @property
    def K(self) -> int:
        return self.size.bit_length() - 1

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def P(self) -> int:
        return self.params.P

    def blocks(self, x: Sequence[int]) -> list[Sequence[int]]:
        P, t = self.params.P, self.params.t
        return [x[i * P:(i + 1) * P] for i in range(t - 1)] + [x[(t - 1) * P:]]

    def from_digits(self, digits: Sequence[int]) -> Word:
        """Codeword whose blocks are the given codebook indices."""
        out = []
        for d in digits[:-1]:
            out.extend(self.interior_book.unrank_bits(d))
        out.extend(self.final_book.unrank_bits(digits[-1]))
        return Word(out)

    def digits(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.n:
            raise ValueError(f"word length {len(x)} differs from code length {self.n}")
        bl = self.blocks(tuple(x))
        try:
            out = [self.interior_book.rank(b) for b in bl[:-1]]
            out.append(self.final_book.rank(bl[-1]))
        except KeyError as exc:
            raise ValueError(f"not a codeword: {exc.args[0]}") from None
        return out

    def encode(self, message: int) -> Word:
        if not 0 <= message < 1 << self.K:
            raise ValueError(f"message {message} outside [0, 2^{self.K})")
        return self.from_digits(self._split(message))

    def _split(self, message: int) -> list[int]:
        message, last = divmod(message, self.q2)
        digits = [last]
        for _ in range(self.params.t - 1):
            message, d = divmod(message, self.q1)
            digits.append(d)
        return digits[::-1]

    def decode_message(self, x: Sequence[int]) -> int:
        digits = self.digits(x)
        value = 0
        for d in digits[:-1]:
            value = value * self.q1 + d
        value = value * self.q2 + digits[-1]
        if value >= 1 << self.K:
            raise ValueError("codeword lies outside the message space")
        return value

    def is_codeword(self, x: Sequence[int]) -> bool:
        try:
            self.digits(x)
        except ValueError:
            return False
        return True

    def redundancy(self) -> float:
        return redundancy(self)

    def to_dict(self) -> dict:
        d = asdict(self.params)
        d.update(q1=self.q1, q2=self.q2, K=self.K)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "FarCode":
        d = json.loads(text)
        code = make_code(d["n"], d["P"], d.get("a1"), d.get("a2"))
        for key in ("t", "s", "q1", "q2", "K"):
            if key in d and d[key] != code.to_dict()[key]:
                raise ValueError(f"parameter file field {key}={d[key]} disagrees with the code ({code.to_dict()[key]})")
        return code


def make_code(n: int, P: int, a1: int | None = None, a2: int | None = None) -> FarCode:
    if P < 2:
        raise ValueError(f"block length P={P} must be at least 2")
    t, s = divmod(n, P)
    if t < 2:
        raise ValueError(f"n={n} gives {t} block(s) of length {P}; need n >= 2P")
    if a1 is None:
        a1, _ = best_residue(P, exclude_constant=True)
    if a2 is None:
        a2, _ = best_residue(P + s)
    return FarCode(FarCodeParams(n, P, t, s, a1, a2))


def redundancy(code: FarCode) -> float:
    """n - log2(code size), from exact integer block sizes."""
    t = code.params.t
    return code.n - ((t - 1) * math.log2(code.q1) + math.log2(code.q2))
