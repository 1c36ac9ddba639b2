"""HTTP facade over the toolkit.

Stateless by design: every request carries its inputs inline (term
text, instance text, advice text), so the service never touches the
filesystem and horizontal copies are interchangeable.
"""

from __future__ import annotations

import random

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..circuits import emit_netlist, metrics, parse_netlist
from ..compiler import check_bounds, compile_family
from ..difftest import diff_catalogue, diff_term
from ..errors import LdcError
from ..evaluator import trace_term
from ..kptgame import (
    GameConfig,
    advice_witness,
    build_advice,
    cooperative_strategies,
    emit_advice,
    parse_advice,
    parse_instance,
    run_interactive,
)
from ..stdlib import catalogue
from ..terms import ClassTag, arity, classify, emit_term, parse_term
from . import models as m


def _fail(e: Exception):
    raise HTTPException(status_code=422, detail=str(e)) from e


def _strategies(name: str, inst, l: int, k: int):
    if name == "cooperative":
        return cooperative_strategies(inst, l, k)
    if name == "zero":
        return tuple(lambda a, h: 0 for _ in range(k))
    raise ValueError(f"unknown strategy {name!r}")


def _shrinkage_ok(rows, l: int) -> bool:
    return all(
        cur[1] < ((l - 1) / l) * prev[1] + 1 for prev, cur in zip(rows, rows[1:])
    )


def create_app() -> FastAPI:
    app = FastAPI(title="ldc", version=__version__)

    @app.get("/health", response_model=m.HealthResponse)
    def health():
        return m.HealthResponse(status="ok", version=__version__)

    @app.get("/stdlib", response_model=m.StdlibResponse)
    def stdlib():
        entries = [
            m.StdlibEntry(
                name=e.name,
                kind=e.kind,
                level=e.level,
                arity=arity(e.term),
                size_c=e.size_c,
                size_deg=e.size_deg,
            )
            for e in catalogue().values()
        ]
        return m.StdlibResponse(entries=sorted(entries, key=lambda e: e.name))

    @app.post("/eval", response_model=m.EvalResponse)
    def eval_endpoint(req: m.EvalRequest):
        try:
            t = parse_term(req.term)
            trace = trace_term(t, list(req.args), req.guard_bits)
        except (LdcError, ValueError) as e:
            _fail(e)
        return m.EvalResponse(
            value=trace.value,
            records=[
                m.StageInfo(kind=r.kind, level=r.level, stages=r.stages)
                for r in trace.records
            ],
            peak_bits=trace.peak_bits,
        )

    @app.post("/compile", response_model=m.CompileResponse)
    def compile_endpoint(req: m.CompileRequest):
        try:
            t = parse_term(req.term)
            fam = compile_family(t, list(req.lengths), req.guard_bits)
        except (LdcError, ValueError) as e:
            _fail(e)
        out = [
            m.CompiledCircuit(
                n=row.n,
                size=row.size,
                depth=row.depth,
                stages=row.stages,
                netlist=emit_netlist(c),
            )
            for row, c in zip(fam.profile, fam.circuits)
        ]
        return m.CompileResponse(circuits=out)

    @app.post("/analyze", response_model=m.AnalyzeResponse)
    def analyze_endpoint(req: m.AnalyzeRequest):
        try:
            t = parse_term(req.term)
            tag = classify(t)
            if req.level is not None:
                kind = "MD" if tag.kind == "MD" else "LD"
                tag = ClassTag(kind, req.level)
            fam = compile_family(t, list(req.lengths), req.guard_bits)
            rep = check_bounds(
                fam.profile, tag, req.size_deg, req.depth_deg, req.size_c, req.depth_c
            )
        except (LdcError, ValueError) as e:
            _fail(e)
        rows = [
            m.AnalyzeRow(
                n=r.n,
                size=r.size,
                depth=r.depth,
                stages=r.stages,
                bound=r.depth_cap,
                ok=r.ok,
                why=r.why,
            )
            for r in rep.rows
        ]
        return m.AnalyzeResponse(
            kind=tag.kind, level=tag.level, passed=rep.passed, rows=rows
        )

    @app.post("/difftest", response_model=m.DiffResponse)
    def difftest_endpoint(req: m.DiffRequest):
        try:
            if req.term is not None:
                t = parse_term(req.term)
                rows = diff_term(
                    "term",
                    t,
                    list(req.lengths),
                    req.seed,
                    req.trials,
                    req.exhaustive_upto,
                    req.guard_bits,
                )
            else:
                rows = diff_catalogue(
                    req.names,
                    list(req.lengths),
                    req.seed,
                    req.trials,
                    req.exhaustive_upto,
                    req.guard_bits,
                )
        except (LdcError, ValueError, KeyError) as e:
            _fail(e)
        out = [
            m.DiffRowOut(
                name=r.name, n=r.n, mode=r.mode, cases=r.cases, mismatches=r.mismatches
            )
            for r in rows
        ]
        return m.DiffResponse(passed=all(r.mismatches == 0 for r in rows), rows=out)

    @app.post("/fmt", response_model=m.FmtResponse)
    def fmt_endpoint(req: m.FmtRequest):
        kind = req.kind
        if kind == "auto":
            kind = "netlist" if req.text.lstrip().startswith("LDC1 ") else "term"
        try:
            if kind == "netlist":
                c = parse_netlist(req.text)
                canonical = emit_netlist(c)
                ok = parse_netlist(canonical) == c
            elif kind == "term":
                t = parse_term(req.text)
                canonical = emit_term(t) + "\n"
                ok = parse_term(canonical) == t
            else:
                raise ValueError(f"unknown format kind {kind!r}")
        except (LdcError, ValueError) as e:
            _fail(e)
        return m.FmtResponse(kind=kind, ok=ok, canonical=canonical)

    @app.post("/game/run", response_model=m.GameRunResponse)
    def game_run(req: m.GameRunRequest):
        try:
            inst, level = parse_instance(req.instance)
            if req.level is not None:
                level = req.level
            l = len(req.items)
            cfg = GameConfig(level, l, _strategies(req.strategy, inst, l, req.k))
            t = run_interactive(cfg, inst, list(req.items))
        except (LdcError, ValueError) as e:
            _fail(e)
        return m.GameRunResponse(
            rounds=[
                m.GameRoundOut(round=i, candidate=r.candidate, counter=r.counter)
                for i, r in enumerate(t.rounds, start=1)
            ],
            accepted_round=t.accepted_round,
            witness=t.witness,
        )

    @app.post("/game/advice", response_model=m.GameAdviceResponse)
    def game_advice(req: m.GameAdviceRequest):
        try:
            inst, level = parse_instance(req.instance)
            if req.level is not None:
                level = req.level
            cfg = GameConfig(level, req.l, cooperative_strategies(inst, req.l))
            rng = None if req.seed is None else random.Random(req.seed)
            pack, log = build_advice(
                sorted(inst.witnesses),
                cfg,
                inst,
                subset_budget=req.subset_budget,
                samples=req.samples,
                rng=rng,
                permute_orderings=req.permute_orderings,
            )
        except (LdcError, ValueError) as e:
            _fail(e)
        return m.GameAdviceResponse(
            pack=emit_advice(pack),
            degraded=pack.degraded,
            total_bits=pack.total_bits,
            passed=not pack.degraded and _shrinkage_ok(log.rows, req.l),
            rows=[
                m.ShrinkageRow(stage=s, size=v, helped=h) for s, v, h in log.rows
            ],
        )

    @app.post("/game/verify", response_model=m.GameVerifyResponse)
    def game_verify(req: m.GameVerifyRequest):
        try:
            inst, level = parse_instance(req.instance)
            if req.level is not None:
                level = req.level
            pack = parse_advice(req.pack)
            cfg = GameConfig(level, pack.l, cooperative_strategies(inst, pack.l))
            rows = []
            for x in sorted(inst.witnesses):
                w = advice_witness(x, pack, inst, cfg, req.permute_orderings)
                ok = w is not None and w in inst.witnesses[x]
                rows.append(m.VerifyRow(item=x, witness=w, ok=ok))
        except (LdcError, ValueError) as e:
            _fail(e)
        return m.GameVerifyResponse(passed=all(r.ok for r in rows), rows=rows)

    return app


app = create_app()
