"""Sequential correction of far deletable error patterns, batch and streaming.

Each pass scans blocks left to right until the first checksum mismatch, then
repairs exactly one error (the earliest one) and the scan resumes at the
repaired block. Blocks before it are untouched and were already verified, so
resuming there gives the same decisions as re-splitting from the start.

Block layout follows the code: t-1 interior blocks of P symbols taken from the
front of the working word, and whatever remains as the final block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from operator import mul
from typing import Iterable, Sequence

from .bitword import ERASURE, ErrorType, ReceivedWord, Word
from .errors import CorrectionError
from .farcode import FarCode, FarCodeParams
from .vt import checksum_difference, correct_erasure, correct_substitution, deletion_candidates

CLEAN = "Clean"
CORRECTED = "Corrected"
FAILED = "Failed"

_DONE, _FIXED, _NEED = range(3)


class DecodeFailure(Exception):
    pass


@dataclass
class DecodeReport:
    recovered: Word | None
    iterations: int
    corrections: list[tuple[int, ErrorType]]
    status: str
    estimate: ReceivedWord = field(repr=False, default=ReceivedWord())
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status != FAILED


def block_split(y: Sequence[int], P: int, count: int | None = None) -> list[list[int]]:
    """Blocks of P symbols with the remainder folded into the last block.

    Without ``count`` the last block has between P and 2P-1 symbols. With
    ``count`` the first count-1 blocks have P symbols and the last takes the rest.
    """
    if len(y) < P:
        raise ValueError(f"received word of length {len(y)} is shorter than one block ({P})")
    if count is None:
        count = len(y) // P
    y = list(y)
    return [y[i * P:(i + 1) * P] for i in range(count - 1)] + [y[(count - 1) * P:]]


def _params(code) -> FarCodeParams:
    return code.params if isinstance(code, FarCode) else code


class _Corrector:
    """One-error-per-pass corrector working in place on a symbol list."""

    def __init__(self, params: FarCodeParams):
        self.P, self.t, self.n = params.P, params.t, params.n
        self.L = params.final_length
        self.a1, self.M1 = params.a1, params.M1
        self.a2, self.M2 = params.a2, params.M2
        self.log: list[tuple[int, ErrorType]] = []

    @staticmethod
    def _diff(blk, a, M):
        if ERASURE in blk:
            return checksum_difference(blk, a, M)
        return (sum(map(mul, range(1, len(blk) + 1), blk)) - a) % M

    def _deletion(self, y, a, M, exclude):
        if ERASURE in y:
            raise DecodeFailure("erasure inside a block that lost a bit")
        cands = deletion_candidates(y, a, M, exclude)
        if len(cands) > 1:
            raise AssertionError(f"ambiguous deletion correction for {y}")
        return cands[0] if cands else None

    def step(self, w: list, start: int, prefix: bool):
        """Scan from block ``start``; returns (outcome, block, required_length)."""
        P, t = self.P, self.t
        j = start
        mismatch = False
        while j < t:
            end = j * P
            if len(w) < end:
                if prefix:
                    return _NEED, j, end
                raise DecodeFailure(f"word too short to hold block {j}")
            blk = w[end - P:end]
            if ERASURE in blk:
                blk = list(correct_erasure(blk, self.a1, self.M1))
                w[end - P:end] = blk
                self.log.append((j, ErrorType.ERASURE))
            if self._diff(blk, self.a1, self.M1):
                mismatch = True
                break
            j += 1
        if not mismatch:
            if prefix:
                return _NEED, t, None
            fin = w[(t - 1) * P:]
            if len(fin) == self.L:
                if ERASURE in fin:
                    fin = list(correct_erasure(fin, self.a2, self.M2))
                    w[(t - 1) * P:] = fin
                    self.log.append((t, ErrorType.ERASURE))
                if not self._diff(fin, self.a2, self.M2):
                    return _DONE, t, None

        # mismatch at block j: first suspect a deletion in the block before it
        if j >= 2:
            lo, hi = (j - 2) * P, (j - 1) * P
            prev = w[lo:hi]
            cand = self._deletion(prev[:-1], self.a1, self.M1, True)
            if cand is not None and cand != prev:
                w[lo:hi] = cand + prev[-1:]
                self.log.append((j - 1, ErrorType.DELETION))
                return _FIXED, j - 1, None

        if j == t:
            lo = (t - 1) * P
            fin = w[lo:]
            if ERASURE in fin:
                raise DecodeFailure("final block holds an erasure plus another error")
            if len(fin) == self.L:
                new, kind = list(correct_substitution(fin, self.a2, self.M2)), ErrorType.SUBSTITUTION
            elif len(fin) == self.L - 1:
                new, kind = self._deletion(fin, self.a2, self.M2, False), ErrorType.DELETION
                if new is None:
                    raise DecodeFailure("final block admits no single-deletion repair")
            else:
                raise DecodeFailure(f"final block has {len(fin)} symbols, expected {self.L} or {self.L - 1}")
            w[lo:] = new
            self.log.append((t, kind))
            return _FIXED, t, None

        # interior block j: the next block tells a flip from a deletion
        if j + 1 < t:
            end = (j + 1) * P
            if len(w) < end:
                if prefix:
                    return _NEED, j, end
                raise DecodeFailure(f"word too short to hold block {j + 1}")
            error_type = self._diff(w[end - P:end], self.a1, self.M1)
        else:
            if prefix:
                return _NEED, j, None
            fin = w[(t - 1) * P:]
            error_type = self._diff(fin, self.a2, self.M2) if len(fin) == self.L else 1

        lo, hi = (j - 1) * P, j * P
        blk = w[lo:hi]
        if error_type == 0:
            new = list(correct_substitution(blk, self.a1, self.M1))
            if sum(new) in (0, P):
                raise DecodeFailure(f"flip repair of block {j} produced a constant block")
            kind = ErrorType.SUBSTITUTION
        else:
            cand = self._deletion(blk[:-1], self.a1, self.M1, True)
            if cand is None:
                raise DecodeFailure(f"block {j} admits no single-deletion repair")
            new = cand + blk[-1:]
            kind = ErrorType.DELETION
        w[lo:hi] = new
        self.log.append((j, kind))
        return _FIXED, j, None

    def validate(self, w):
        if len(w) != self.n:
            raise DecodeFailure(f"estimate has {len(w)} symbols, expected {self.n}")
        P = self.P
        for j in range(self.t - 1):
            s = sum(w[j * P:(j + 1) * P])
            if s == 0 or s == P:
                raise DecodeFailure(f"interior block {j + 1} is constant")


def iteration_cap(params: FarCodeParams) -> int:
    return params.n // (3 * params.P) + 2


def correct_once(y: Sequence[int], code) -> tuple[ReceivedWord, tuple[int, ErrorType] | None]:
    """One scan-and-repair pass. Returns the repaired word and the repair, or None when nothing mismatched.

    Erasures met during the scan are filled in and show up only in the word.
    Raises DecodeFailure when no consistent repair exists.
    """
    c = _Corrector(_params(code))
    w = list(y)
    try:
        outcome, _, _ = c.step(w, 1, False)
    except CorrectionError as exc:
        raise DecodeFailure(str(exc)) from None
    record = None
    if outcome == _FIXED:
        record = next(r for r in reversed(c.log) if r[1] is not ErrorType.ERASURE)
    return ReceivedWord(w), record


def decode(y: Sequence[int], code) -> DecodeReport:
    params = _params(code)
    c = _Corrector(params)
    w = list(y)
    cap = iteration_cap(params)
    iterations = 0
    start = 1
    try:
        while True:
            iterations += 1
            if iterations > cap:
                raise DecodeFailure(f"no convergence within {cap} passes")
            outcome, start, _ = c.step(w, start, False)
            if outcome == _DONE:
                break
        c.validate(w)
    except (DecodeFailure, CorrectionError) as exc:
        return DecodeReport(None, iterations, c.log, FAILED, ReceivedWord(w), str(exc))
    status = CLEAN if not c.log else CORRECTED
    return DecodeReport(Word(w), iterations, c.log, status, ReceivedWord(w))


class StreamDecoder:
    """Incremental decoder that commits whole blocks as soon as they are settled.

    Block k is final once blocks k and k+1 both pass their checksums: only a
    mismatch at block k+1 could still rewrite block k. Every decision about a
    far pattern looks at most two blocks past the block being repaired, so
    after 4P source bits beyond block k the commitment has happened.
    Interior block t-1 and the final block wait for ``finish``.
    """

    def __init__(self, code):
        self.params = _params(code)
        self._c = _Corrector(self.params)
        self._cap = iteration_cap(self.params)
        self.buffer: list[int] = []
        self.received = 0
        self.committed = 0
        self.status: str | None = None
        self.reason = ""
        self._start = 1
        self._need = self.params.P
        self._fixes = 0

    @property
    def failed(self) -> bool:
        return self.status == FAILED

    @property
    def pending(self) -> list[int]:
        return self.buffer[self.committed:]

    def feed(self, symbol: int) -> list[Word]:
        """Absorb one channel symbol; returns the blocks committed by it."""
        if self.status is not None:
            if self.failed:
                return []
            raise RuntimeError("stream already finished")
        if symbol not in (0, 1, ERASURE):
            raise ValueError(f"invalid channel symbol {symbol!r}")
        self.buffer.append(symbol)
        self.received += 1
        if len(self.buffer) < self._need:
            return []
        try:
            while True:
                outcome, j, req = self._c.step(self.buffer, self._start, True)
                self._start = j
                if outcome == _FIXED:
                    self._count_fix()
                    continue
                self._need = req if req is not None else math.inf
                break
        except (DecodeFailure, CorrectionError) as exc:
            return self._fail(str(exc))
        # blocks 1..j-1 pass, so blocks 1..j-2 can no longer change
        return self._commit_through(j - 2)

    def _count_fix(self):
        self._fixes += 1
        if self._fixes >= self._cap:
            raise DecodeFailure(f"more than {self._cap - 1} repairs")

    def _fail(self, reason):
        self.status = FAILED
        self.reason = reason
        return []

    def _commit_through(self, k):
        P = self.params.P
        out = []
        while self.committed // P < k:
            lo = self.committed
            out.append(Word(self.buffer[lo:lo + P]))
            self.committed += P
        return out

    def finish(self) -> tuple[list[Word], str]:
        """End of channel input: settle the tail and return the remaining blocks."""
        if self.status is not None:
            return [], self.status
        try:
            while True:
                outcome, self._start, _ = self._c.step(self.buffer, self._start, False)
                if outcome == _DONE:
                    break
                self._count_fix()
            self._c.validate(self.buffer)
        except (DecodeFailure, CorrectionError) as exc:
            self._fail(str(exc))
            return [], FAILED
        out = self._commit_through(self.params.t - 1)
        out.append(Word(self.buffer[self.committed:]))
        self.committed = len(self.buffer)
        self.status = CLEAN if not self._c.log else CORRECTED
        return out, self.status

    @property
    def corrections(self) -> list[tuple[int, ErrorType]]:
        return list(self._c.log)


def stream_feed(state: StreamDecoder, symbol: int) -> tuple[StreamDecoder, list[int]]:
    """Functional form of ``StreamDecoder.feed`` returning flat emitted bits."""
    blocks = state.feed(symbol)
    return state, [b for blk in blocks for b in blk]


def stream_decode(symbols: Iterable[int], code) -> tuple[list[Word], str]:
    dec = StreamDecoder(code)
    out = []
    for s in symbols:
        out.extend(dec.feed(s))
    tail, status = dec.finish()
    if status == FAILED:
        return out, status
    return out + tail, status
