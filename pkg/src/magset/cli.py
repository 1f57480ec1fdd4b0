"""Deterministic command-line front end.

Subcommands
-----------
construct   build a maximal valid set for a modulus, with provenance
verify      check a user-supplied set, printing a collision witness if any
search      exhaustive maximum-size search (cached, budgeted)
table       reproduce the per-prime pattern tables for moduli 2p
bound       print the packing upper bound floor((q-1)/lambda)
encode      map a message to a codeword of the set's linear code
decode      correct a single limited-magnitude error in a received word
simulate    run the random single-error channel and report statistics

Exit codes: 0 success, 1 domain error (invalid set, budget exhausted,
uncorrectable word), 2 usage error (unparseable arguments, modulus whose
odd part is divisible by 3).

All output is deterministic for identical flags; search budgets given on
the command line are node counts only (no wall-clock component), so even
cut-off results are reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from .codec import (UnknownSyndromeError, decode, encode, make_code,
                    simulate_channel)
from .constructions import (OPTIMAL_CASES, build_divisor_piece, construct,
                            divisor_context, hamming_upper_bound)
from .search import Budget, SearchCache, default_cache_path, exact_max
from .verifier import format_witness, is_b1_set

# Node-only budgets keep cut-off results reproducible run to run.
_CLI_DEFAULT_BUDGET = Budget(max_nodes=10**8, max_seconds=math.inf)


def _csv_ints(text: str) -> tuple[int, ...]:
    """argparse type: comma-separated integers ('1,5,8')."""
    try:
        items = tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not items and text.strip() not in ("", ","):
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    return items


def _csv(values: Sequence[int]) -> str:
    return ",".join(str(v) for v in values)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


# --------------------------------------------------------------------------
# construct
# --------------------------------------------------------------------------

def _cmd_construct(args: argparse.Namespace) -> int:
    q = args.q
    k = (q & -q).bit_length() - 1
    r = q >> k
    if math.gcd(r, 6) != 1:
        args.parser.error(
            f"--q {q}: odd part {r} is divisible by 3; "
            "supported moduli are 2^k * r with gcd(r, 6) = 1")
    report = construct(q)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
        return 0
    inst = report.instance
    print(f"q = {inst.q} = 2^{inst.k} * {inst.r}   lambda = {inst.lam}")
    status = "tight (maximum possible)" if report.tight else "lower bound"
    print(f"size = {report.size}   upper bound = {report.upper_bound}   "
          f"verified = {'yes' if report.verified else 'NO'}   [{status}]")
    print(f"elements = {_csv(sorted(report.elements))}")
    base = report.base
    if base is not None:
        print(f"base: q = {base.instance.q}, size = {base.size} "
              f"(elements appear scaled by 8)")
    for piece in sorted(report.pieces, key=lambda p: p.d):
        tag = "certified" if piece.certified else "pattern"
        print(f"  divisor {piece.d:>4}  [{piece.case}] ({tag}): "
              f"{_csv(sorted(piece.elements)) or '-'}")
    return 0


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def _cmd_verify(args: argparse.Namespace) -> int:
    verdict = is_b1_set(args.set, args.q, args.lam)
    if verdict.valid:
        print(f"valid: {len(args.set)} elements, all {args.lam}*{len(args.set)} "
              f"products distinct and nonzero mod {args.q}")
        return 0
    print(f"invalid: {format_witness(verdict.witness, args.q)}")
    return 1


# --------------------------------------------------------------------------
# search
# --------------------------------------------------------------------------

def _cmd_search(args: argparse.Namespace) -> int:
    budget = (_CLI_DEFAULT_BUDGET if args.budget is None
              else Budget(max_nodes=args.budget, max_seconds=math.inf))
    cache = SearchCache(args.cache if args.cache is not None
                        else default_cache_path())
    result = exact_max(args.q, args.lam, budget=budget, cache=cache)
    if args.json:
        print(json.dumps(result.to_record(), indent=2))
        return 0 if result.exact else 1
    rel = "=" if result.exact else ">="
    print(f"max size {rel} {result.max_size}   (q = {args.q}, "
          f"lambda = {args.lam}, {result.nodes_expanded} nodes, "
          f"{result.elapsed * 1000.0:.1f} ms)")
    if result.witness:
        print(f"witness = {_csv(result.witness)}")
    if not result.exact:
        print("budget exhausted: size is only a lower bound", file=sys.stderr)
        return 1
    return 0


# --------------------------------------------------------------------------
# table
# --------------------------------------------------------------------------

def _primes_in(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p < hi (simple sieve; hi is small)."""
    if hi <= 2:
        return []
    sieve = bytearray([1]) * hi
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(hi**0.5) + 1):
        if sieve[p]:
            sieve[p * p:hi:p] = b"\x00" * len(range(p * p, hi, p))
    return [p for p in range(max(lo, 2), hi) if sieve[p]]


def _table_rows(max_p: int, oracle: bool) -> tuple[list[list[str]], list[list[str]]]:
    """Row data (as strings) for the two pattern families at q = 2p."""
    rows_a: list[list[str]] = []
    rows_b: list[list[str]] = []
    for p in _primes_in(5, max_p):
        ctx = divisor_context(p)
        piece = build_divisor_piece(p, 2 * p)
        certified = piece.case in OPTIMAL_CASES
        size = f"{len(piece.elements)}" if certified else f">={len(piece.elements)}"
        witness = " ".join(str(x) for x in sorted(piece.elements))
        extra: list[str] = []
        if oracle:
            exact = exact_max(2 * p, 4, budget=_CLI_DEFAULT_BUDGET)
            gap = "TIGHT" if exact.max_size == len(piece.elements) else "GAP"
            extra = [str(exact.max_size), gap]
        if ctx.two_in_three:
            # In the even-order/odd-shift case the pattern uses neither
            # k' nor r'; print dashes there, as the reference tables do.
            dashes = ctx.n % 2 == 0 and ctx.s % 2 == 1
            kp = "-" if dashes else str(ctx.k_prime)
            rp = "-" if dashes else str(ctx.r_prime)
            rows_a.append([str(p), str(ctx.n), str(ctx.m), kp, rp,
                           size, *extra, witness])
        else:
            rows_b.append([str(p), str(ctx.n), str(ctx.t), str(ctx.s),
                           str(len(ctx.reps)), size, *extra, witness])
    return rows_a, rows_b


def _emit_table(title: str, header: list[str], rows: list[list[str]],
                markdown: bool) -> None:
    if markdown:
        print(f"### {title}")
        print("| " + " | ".join(header) + " |")
        print("|" + "|".join("---" for _ in header) + "|")
        for row in rows:
            print("| " + " | ".join(row) + " |")
        print()
        return
    print(f"== {title} ==")
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows
              else len(header[i]) for i in range(len(header))]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    print()


def _cmd_table(args: argparse.Namespace) -> int:
    rows_a, rows_b = _table_rows(args.max_p, args.oracle)
    extra = ["exact", "tight?"] if args.oracle else []
    _emit_table("q = 2p, doubling inside the orbit of 3 (circulant patterns)",
                ["p", "n", "m", "k'", "r'", "size", *extra, "witness"],
                rows_a, args.md)
    _emit_table("q = 2p, doubling outside the orbit of 3 (grid patterns)",
                ["p", "n", "t", "s", "cosets", "size", *extra, "witness"],
                rows_b, args.md)
    return 0


# --------------------------------------------------------------------------
# bound / codec passthroughs
# --------------------------------------------------------------------------

def _cmd_bound(args: argparse.Namespace) -> int:
    print(hamming_upper_bound(args.q, args.lam))
    return 0


def _cmd_encode(args: argparse.Namespace) -> int:
    code = make_code(args.set, args.q)
    word = encode(code, args.message)
    print(_csv(word))
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    code = make_code(args.set, args.q)
    try:
        word, error = decode(code, args.word)
    except UnknownSyndromeError as exc:
        print(f"detected (uncorrectable): {exc}")
        return 1
    if error is None:
        print("no error")
    else:
        position, magnitude = error
        print(f"corrected (pos {position}, mag {magnitude})")
    print(f"codeword: {_csv(word)}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    code = make_code(args.set, args.q)
    stats = simulate_channel(code, args.trials, error_rate=args.error_rate,
                             seed=args.seed)
    print(json.dumps(stats.to_json_dict()))
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magset",
        description="Maximal sets for single asymmetric limited-magnitude "
                    "error correction: construction, search, verification, "
                    "and the resulting codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(handler=handler, parser=p)
        return p

    p = add("construct", _cmd_construct,
            "build a maximal valid set for modulus q")
    p.add_argument("--q", type=_positive, required=True,
                   help="modulus, of the form 2^k * r with gcd(r, 6) = 1")
    p.add_argument("--json", action="store_true",
                   help="emit the full report as JSON")

    p = add("verify", _cmd_verify, "check a set; exit 0 valid, 1 invalid")
    p.add_argument("--q", type=_positive, required=True, help="modulus")
    p.add_argument("--lambda", dest="lam", type=_positive, default=4,
                   help="magnitude bound (default 4)")
    p.add_argument("--set", type=_csv_ints, required=True,
                   help="comma-separated residues, e.g. 1,5,8,9")

    p = add("search", _cmd_search,
            "exhaustive maximum-size search for modulus q")
    p.add_argument("--q", type=_positive, required=True, help="modulus")
    p.add_argument("--lambda", dest="lam", type=_positive, default=4,
                   help="magnitude bound (default 4)")
    p.add_argument("--budget", type=_positive, default=None,
                   help="search-node budget (default 10^8)")
    p.add_argument("--cache", default=None, metavar="FILE",
                   help="JSONL result cache (default ./magset-cache.jsonl, "
                        "or $MAGSET_CACHE)")
    p.add_argument("--json", action="store_true",
                   help="emit the result record as JSON")

    p = add("table", _cmd_table,
            "reproduce the per-prime pattern tables for moduli 2p")
    p.add_argument("--family", choices=["2p"], required=True,
                   help="modulus family (only 2p)")
    p.add_argument("--max-p", dest="max_p", type=_positive, default=100,
                   help="strict upper limit for the primes p (default 100)")
    p.add_argument("--oracle", action="store_true",
                   help="add exhaustive-search columns (exact size, TIGHT/GAP)")
    p.add_argument("--md", action="store_true",
                   help="emit GitHub-flavored markdown")

    p = add("bound", _cmd_bound, "print the packing upper bound")
    p.add_argument("--q", type=_positive, required=True, help="modulus")
    p.add_argument("--lambda", dest="lam", type=_positive, default=4,
                   help="magnitude bound (default 4)")

    p = add("encode", _cmd_encode, "encode a message word")
    p.add_argument("--q", type=_positive, required=True, help="modulus")
    p.add_argument("--set", type=_csv_ints, required=True,
                   help="parity row: comma-separated valid set")
    p.add_argument("--message", type=_csv_ints, required=True,
                   help="comma-separated message symbols (length |set| - 1)")

    p = add("decode", _cmd_decode, "decode/correct a received word")
    p.add_argument("--q", type=_positive, required=True, help="modulus")
    p.add_argument("--set", type=_csv_ints, required=True,
                   help="parity row: comma-separated valid set")
    p.add_argument("--word", type=_csv_ints, required=True,
                   help="received word, length |set|")

    p = add("simulate", _cmd_simulate,
            "random single-error channel simulation (prints JSON stats)")
    p.add_argument("--q", type=_positive, required=True, help="modulus")
    p.add_argument("--set", type=_csv_ints, required=True,
                   help="parity row: comma-separated valid set")
    p.add_argument("--trials", type=int, required=True,
                   help="number of independent trials")
    p.add_argument("--seed", type=int, default=0,
                   help="master RNG seed (default 0)")
    p.add_argument("--error-rate", dest="error_rate", type=float, default=1.0,
                   help="per-trial corruption probability (default 1.0)")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:  # domain errors (invalid set, no pivot, ...)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
