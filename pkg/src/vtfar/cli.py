"""Command-line front end.

Exit codes: 0 success, 1 a decode or verification failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import analysis
from .bitword import ErrorPattern, ReceivedWord, Word, apply_pattern, sample_far_pattern, sample_pattern
from .decoder import FAILED, StreamDecoder, decode
from .errors import BudgetExceeded
from .farcode import FarCode, make_code
from .vt import VTCodebook

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _block_length(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"block length must be at least 2, got {v}")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _load_code(args) -> FarCode:
    if getattr(args, "params", None):
        return FarCode.loads(Path(args.params).read_text())
    if args.n is None or args.P is None:
        raise UsageError("give --params or both --n and --P")
    return make_code(args.n, args.P, getattr(args, "a1", None), getattr(args, "a2", None))


def _input_lines(args):
    if getattr(args, "input", None):
        src = open(args.input)
        args._opened.append(src)
    else:
        src = sys.stdin
    for line in src:
        line = line.strip()
        if line:
            yield line


def _out(args):
    if not getattr(args, "output", None):
        return sys.stdout
    fh = open(args.output, "w")
    args._opened.append(fh)
    return fh


def _seed(args):
    if args.seed is None:
        args.seed = random.SystemRandom().randrange(2**32)
        print(f"seed={args.seed}", file=sys.stderr)
    return args.seed


def cmd_gen_params(args):
    code = make_code(args.n, args.P, args.a1, args.a2)
    _out(args).write(code.dumps())
    return EXIT_OK


def cmd_encode(args):
    code = _load_code(args)
    messages = args.message if args.message is not None else _input_lines(args)
    out = _out(args)
    for m in messages:
        try:
            value = int(m)
        except ValueError:
            raise UsageError(f"message {m!r} is not an integer") from None
        print(code.encode(value), file=out)
    return EXIT_OK


def cmd_decode(args):
    code = _load_code(args)
    out = _out(args)
    rc = EXIT_OK
    for line in _input_lines(args):
        r = decode(ReceivedWord.parse(line), code)
        print(f"STATUS {r.status} iterations={r.iterations} "
              f"corrections={','.join(f'{b}{k.value}' for b, k in r.corrections) or '-'}", file=sys.stderr)
        if r.status == FAILED:
            print(f"reason={r.reason}", file=sys.stderr)
            rc = EXIT_FAILED
            continue
        if args.word:
            print(r.recovered, file=out)
        else:
            try:
                print(code.decode_message(r.recovered), file=out)
            except ValueError as exc:
                print(f"reason={exc}", file=sys.stderr)
                rc = EXIT_FAILED
    return rc


def cmd_corrupt(args):
    if bool(args.pattern is not None) == bool(args.random):
        raise UsageError("give exactly one of --pattern or --random")
    Q = None
    if args.far:
        if args.Q is not None:
            Q = args.Q
        elif args.params or args.P is not None:
            Q = 3 * (_load_code(args).P if args.params else args.P)
        else:
            raise UsageError("--far needs --Q, --P or --params")
    rng = random.Random(_seed(args)) if args.random else None
    out = _out(args)
    for line in _input_lines(args):
        x = Word.parse(line)
        if args.pattern is not None:
            g = ErrorPattern.parse(args.pattern, len(x))
        elif Q is not None:
            g = sample_far_pattern(len(x), Q, args.t, rng=rng)
        else:
            g = sample_pattern(len(x), len(x) if args.t is None else args.t, rng=rng)
        if args.random:
            print(f"pattern={g or '-'}", file=sys.stderr)
        print(apply_pattern(x, g), file=out)
    return EXIT_OK


def cmd_stream(args):
    code = _load_code(args)
    dec = StreamDecoder(code)
    out = _out(args)
    for line in _input_lines(args):
        if len(line) != 1:
            raise UsageError(f"stream input must be one symbol per line, got {line!r}")
        sym = ReceivedWord.parse(line)[0]
        for blk in dec.feed(sym):
            print(blk, file=out, flush=True)
    tail, status = dec.finish()
    for blk in tail:
        print(blk, file=out)
    print(f"STATUS {status}", file=out)
    return EXIT_FAILED if status == FAILED else EXIT_OK


def cmd_verify(args):
    code = _load_code(args)
    if args.exhaustive:
        report = analysis.verify_code(code, "exhaustive", jobs=args.jobs, Q=args.Q,
                                      check_stream=args.stream, check_prefix=args.prefix)
    else:
        report = analysis.verify_code(code, "sampled", samples=args.samples, seed=args.seed,
                                      t=args.t, Q=args.Q, check_stream=args.stream)
    out = _out(args)
    for line in report.lines():
        print(line, file=out)
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_bounds(args):
    out = _out(args)
    combos = [(n, t, d) for n in args.n for t in args.t for d in args.d]
    if args.csv:
        out.write(analysis.fraction_grid_csv(analysis.verify_fraction_bound(*c) for c in combos))
        return EXIT_OK
    for i, (n, t, d) in enumerate(combos):
        if i:
            print(file=out)
        for line in analysis.compute_bounds(n, t, d).lines():
            print(line, file=out)
        if args.fraction:
            for line in analysis.verify_fraction_bound(n, t, d).lines():
                print(f"fraction_{line}", file=out)
    return EXIT_OK


def cmd_count(args):
    out = _out(args)
    for line in analysis.count_far_patterns(args.n, args.t, args.Q).lines():
        print(line, file=out)
    return EXIT_OK


def cmd_codebook(args):
    book = VTCodebook(args.m, args.a, args.exclude_constant)
    _out(args).write(book.dump())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vtfar", description="VT block codes for channels with deletions, erasures and flips")
    sub = p.add_subparsers(dest="command", required=True)

    def code_args(sp):
        sp.add_argument("--params", help="parameter file written by gen-params")
        sp.add_argument("--n", type=_positive)
        sp.add_argument("--P", type=_block_length)
        sp.add_argument("--a1", type=int)
        sp.add_argument("--a2", type=int)

    def io_args(sp):
        sp.add_argument("-i", "--input", help="read from file instead of stdin")
        sp.add_argument("-o", "--output", help="write to file instead of stdout")

    sp = sub.add_parser("gen-params", help="build a code and write its parameter file")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--P", type=_block_length, required=True)
    sp.add_argument("--a1", type=int)
    sp.add_argument("--a2", type=int)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen_params)

    sp = sub.add_parser("encode", help="messages (integers) to codewords")
    code_args(sp)
    io_args(sp)
    sp.add_argument("--message", nargs="+")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="received words to messages")
    code_args(sp)
    io_args(sp)
    sp.add_argument("--word", action="store_true", help="print the recovered codeword instead of the message")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("corrupt", help="apply an error pattern to words")
    code_args(sp)
    io_args(sp)
    sp.add_argument("--pattern", help="e.g. 1F,3D,4F,5E")
    sp.add_argument("--random", action="store_true", help="draw a uniform pattern")
    sp.add_argument("--far", action="store_true", help="restrict random patterns to Q-far ones (Q=3P by default)")
    sp.add_argument("--Q", type=_positive)
    sp.add_argument("--t", type=int, help="maximum number of errors")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_corrupt)

    sp = sub.add_parser("stream", help="decode one symbol per line, committing blocks as they settle")
    code_args(sp)
    io_args(sp)
    sp.set_defaults(func=cmd_stream)

    sp = sub.add_parser("verify", help="decode codewords under far patterns and report failures")
    code_args(sp)
    sp.add_argument("-o", "--output")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=_positive, default=1000)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--t", type=int, help="maximum errors per sampled pattern")
    sp.add_argument("--jobs", type=_positive, default=1)
    sp.add_argument("--Q", type=_positive, help="pattern spacing; below 3P is outside the guarantee")
    sp.add_argument("--stream", action="store_true", help="also check the streaming delay")
    sp.add_argument("--prefix", action="store_true", help="also check corrupted-prefix distinctness (exhaustive only)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bounds", help="evaluate redundancy and error-probability bounds")
    sp.add_argument("--n", type=_positive, nargs="+", required=True)
    sp.add_argument("--t", type=_positive, nargs="+", required=True)
    sp.add_argument("--d", type=_positive, nargs="+", required=True)
    sp.add_argument("--fraction", action="store_true", help="add the exact non-far fraction check")
    sp.add_argument("--csv", action="store_true", help="CSV grid of fraction checks")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("count", help="exact counts of all and Q-far patterns")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--Q", type=_positive, required=True)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("codebook", help="dump a VT codebook")
    sp.add_argument("--m", type=_block_length, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--exclude-constant", action="store_true")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_codebook)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._opened = []
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, BudgetExceeded, OSError) as exc:
        print(f"vtfar {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        for fh in args._opened:
            fh.close()


if __name__ == "__main__":
    sys.exit(main())
