"""Command line client for the toolkit.

Every subcommand is a thin wrapper over the HTTP service: requests are
built from files and flags, sent either to an in-process app instance
or to a remote server given with --server, and the JSON reply is
rendered as TSV on standard output.  Diagnostics go to standard error,
so pipelines see tables only.

Exit status: 0 when all checks pass, 1 when a check fails, 2 on usage
or input errors.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx

from .naturals import DEFAULT_GUARD_BITS
from .service import create_app

_USAGE_ERROR = 2
_CHECK_FAILED = 1


def _post(server: str | None, path: str, payload: dict) -> dict:
    """Send one request, in process unless a server URL is given."""

    async def go():
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=None) as client:
                return await client.post(path, json=payload)
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://service", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    reply = asyncio.run(go())
    if reply.status_code != 200:
        detail = reply.json().get("detail", reply.text)
        raise SystemExit(_die(f"request failed: {detail}"))
    return reply.json()


def _die(message: str) -> int:
    print(message, file=sys.stderr)
    return _USAGE_ERROR


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise SystemExit(_die(str(e)))


def _tsv(header: list[str], rows: list[list]) -> None:
    print("\t".join(header))
    for row in rows:
        print("\t".join("" if v is None else str(v) for v in row))


def _lengths(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad length list {text!r}")


def _items(text: str) -> list[int]:
    try:
        return [int(tok, 0) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad item list {text!r}")


def _cmd_eval(args) -> int:
    reply = _post(
        args.server,
        "/eval",
        {
            "term": _read(args.term),
            "args": [int(a, 0) for a in args.args],
            "guard_bits": args.guard_bits,
        },
    )
    for r in reply["records"]:
        level = "-" if r["level"] is None else r["level"]
        print(f"{r['kind']} level={level} stages={r['stages']}", file=sys.stderr)
    print(reply["value"])
    return 0


def _cmd_compile(args) -> int:
    if args.out and len(args.lengths) != 1:
        return _die("--out takes exactly one length; use --out-dir for several")
    if not args.out and not args.out_dir and len(args.lengths) != 1:
        return _die("multiple lengths need --out-dir")
    reply = _post(
        args.server,
        "/compile",
        {"term": _read(args.term), "lengths": args.lengths, "guard_bits": args.guard_bits},
    )
    circuits = reply["circuits"]
    if args.out_dir:
        stem = Path(args.term).stem
        outdir = Path(args.out_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        rows = []
        for c in circuits:
            path = outdir / f"{stem}.n{c['n']}.netlist"
            path.write_text(c["netlist"])
            rows.append([c["n"], c["size"], c["depth"], c["stages"], path])
        _tsv(["n", "size", "depth", "stages", "path"], rows)
    elif args.out:
        c = circuits[0]
        Path(args.out).write_text(c["netlist"])
        _tsv(
            ["n", "size", "depth", "stages", "path"],
            [[c["n"], c["size"], c["depth"], c["stages"], args.out]],
        )
    else:
        c = circuits[0]
        print(f"n={c['n']} size={c['size']} depth={c['depth']}", file=sys.stderr)
        sys.stdout.write(c["netlist"])
    return 0


def _cmd_analyze(args) -> int:
    reply = _post(
        args.server,
        "/analyze",
        {
            "term": _read(args.term),
            "lengths": args.lengths,
            "level": args.level,
            "size_deg": args.size_deg,
            "depth_deg": args.depth_deg,
            "size_c": args.size_c,
            "depth_c": args.depth_c,
            "guard_bits": args.guard_bits,
        },
    )
    level = "-" if reply["level"] is None else reply["level"]
    print(f"class={reply['kind']} level={level}", file=sys.stderr)
    rows = []
    for r in reply["rows"]:
        rows.append(
            [r["n"], r["size"], r["depth"], r["stages"], f"{r['bound']:g}", int(r["ok"])]
        )
        if r["why"]:
            print(f"n={r['n']}: {r['why']}", file=sys.stderr)
    _tsv(["n", "size", "depth", "stages", "bound", "pass"], rows)
    return 0 if reply["passed"] else _CHECK_FAILED


def _cmd_difftest(args) -> int:
    payload = {
        "lengths": args.lengths,
        "seed": args.seed,
        "trials": args.trials,
        "exhaustive_upto": args.exhaustive_upto,
        "guard_bits": args.guard_bits,
    }
    if args.term:
        payload["term"] = _read(args.term)
    elif args.name:
        payload["names"] = args.name
    reply = _post(args.server, "/difftest", payload)
    rows = [
        [r["name"], r["n"], r["mode"], r["cases"], r["mismatches"], int(r["mismatches"] == 0)]
        for r in reply["rows"]
    ]
    _tsv(["term", "n", "mode", "cases", "mismatches", "pass"], rows)
    return 0 if reply["passed"] else _CHECK_FAILED


def _cmd_fmt(args) -> int:
    reply = _post(args.server, "/fmt", {"text": _read(args.file), "kind": args.kind})
    if not reply["ok"]:
        print(f"{args.file}: {reply['kind']} round-trip failed", file=sys.stderr)
        return _CHECK_FAILED
    sys.stdout.write(reply["canonical"])
    return 0


def _cmd_game_run(args) -> int:
    reply = _post(
        args.server,
        "/game/run",
        {
            "instance": _read(args.instance),
            "items": args.items,
            "strategy": args.strategy,
            "k": args.k,
            "level": args.level,
        },
    )
    rows = []
    for r in reply["rounds"]:
        witness = reply["witness"] if r["round"] == reply["accepted_round"] else None
        rows.append([r["round"], r["candidate"], r["counter"], witness])
    _tsv(["round", "candidate", "counter", "witness"], rows)
    if reply["accepted_round"] is None:
        print("no strategy was accepted", file=sys.stderr)
        return _CHECK_FAILED
    return 0


def _cmd_game_advice(args) -> int:
    reply = _post(
        args.server,
        "/game/advice",
        {
            "instance": _read(args.instance),
            "l": args.l,
            "level": args.level,
            "subset_budget": args.subset_budget,
            "samples": args.samples,
            "seed": args.seed,
            "permute_orderings": args.permute_orderings,
        },
    )
    table = [[r["stage"], r["size"], r["helped"]] for r in reply["rows"]]
    if args.out:
        Path(args.out).write_text(reply["pack"])
        _tsv(["stage", "size", "helped"], table)
    else:
        sys.stdout.write(reply["pack"])
        print("stage\tsize\thelped", file=sys.stderr)
        for row in table:
            print("\t".join(str(v) for v in row), file=sys.stderr)
    bits = reply["total_bits"]
    print(f"degraded={int(reply['degraded'])} total_bits={bits}", file=sys.stderr)
    return 0 if reply["passed"] else _CHECK_FAILED


def _cmd_game_verify(args) -> int:
    reply = _post(
        args.server,
        "/game/verify",
        {
            "instance": _read(args.instance),
            "pack": _read(args.pack),
            "level": args.level,
            "permute_orderings": args.permute_orderings,
        },
    )
    rows = [[r["item"], r["witness"], int(r["ok"])] for r in reply["rows"]]
    _tsv(["item", "witness", "pass"], rows)
    return 0 if reply["passed"] else _CHECK_FAILED


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ldc", description="circuit compiler and witnessing game toolkit"
    )
    top.add_argument("--server", help="service URL; default runs in process")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--guard-bits", type=int, default=DEFAULT_GUARD_BITS)

    p = sub.add_parser("eval", help="evaluate a term file on integer arguments")
    p.add_argument("term")
    p.add_argument("args", nargs="*", help="arguments, decimal or 0x hex")
    common(p)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("compile", help="compile a term file to netlists")
    p.add_argument("term")
    p.add_argument("--lengths", type=_lengths, required=True)
    p.add_argument("--out", help="netlist path, single length only")
    p.add_argument("--out-dir", help="directory for one netlist per length")
    common(p)
    p.set_defaults(fn=_cmd_compile)

    p = sub.add_parser("analyze", help="profile a term against class bounds")
    p.add_argument("term")
    p.add_argument("--lengths", type=_lengths, required=True)
    p.add_argument("--level", type=int, help="claim this recursion level")
    p.add_argument("--size-deg", type=int, default=3)
    p.add_argument("--depth-deg", type=int, default=2)
    p.add_argument("--size-c", type=float, default=50.0)
    p.add_argument("--depth-c", type=float, default=50.0)
    common(p)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("difftest", help="compare compiled circuits with the evaluator")
    p.add_argument("term", nargs="?", help="term file; defaults to the full catalogue")
    p.add_argument("--name", action="append", help="catalogue entry, repeatable")
    p.add_argument("--lengths", type=_lengths, default=[8, 16, 32, 64])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--exhaustive-upto", type=int, default=10,
                   help="sweep all inputs up to this total bit width")
    common(p)
    p.set_defaults(fn=_cmd_difftest)

    p = sub.add_parser("fmt", help="canonicalize a term or netlist file")
    p.add_argument("file")
    p.add_argument("--kind", choices=["auto", "term", "netlist"], default="auto")
    common(p)
    p.set_defaults(fn=_cmd_fmt)

    game = sub.add_parser("game", help="interactive witnessing game")
    gsub = game.add_subparsers(dest="game_command", required=True)

    p = gsub.add_parser("run", help="play strategies on an instance file")
    p.add_argument("instance")
    p.add_argument("--items", type=_items, required=True)
    p.add_argument("--strategy", choices=["cooperative", "zero"], default="cooperative")
    p.add_argument("--k", type=int, default=1, help="number of strategy rounds")
    p.add_argument("--level", type=int, help="override the instance level")
    p.set_defaults(fn=_cmd_game_run)

    p = gsub.add_parser("advice", help="build staged advice for an instance")
    p.add_argument("instance")
    p.add_argument("--l", type=int, required=True, help="game group size")
    p.add_argument("--level", type=int, help="override the instance level")
    p.add_argument("--subset-budget", type=int, default=50000)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--seed", type=int)
    p.add_argument("--permute-orderings", action="store_true")
    p.add_argument("--out", help="write the advice pack here")
    p.set_defaults(fn=_cmd_game_advice)

    p = gsub.add_parser("verify", help="check an advice pack covers an instance")
    p.add_argument("instance")
    p.add_argument("pack")
    p.add_argument("--level", type=int, help="override the instance level")
    p.add_argument("--permute-orderings", action="store_true")
    p.set_defaults(fn=_cmd_game_verify)

    return top


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.fn(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else _USAGE_ERROR
    except httpx.HTTPError as e:
        return _die(f"transport error: {e}")


if __name__ == "__main__":
    sys.exit(main())
