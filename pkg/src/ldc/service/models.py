"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..naturals import DEFAULT_GUARD_BITS


class HealthResponse(BaseModel):
    status: str
    version: str


class EvalRequest(BaseModel):
    term: str
    args: list[int]
    guard_bits: int = DEFAULT_GUARD_BITS


class StageInfo(BaseModel):
    kind: str
    level: int | None
    stages: int


class EvalResponse(BaseModel):
    value: int
    records: list[StageInfo]
    peak_bits: int


class CompileRequest(BaseModel):
    term: str
    lengths: list[int] = Field(min_length=1)
    guard_bits: int = DEFAULT_GUARD_BITS


class CompiledCircuit(BaseModel):
    n: int
    size: int
    depth: int
    stages: int
    netlist: str


class CompileResponse(BaseModel):
    circuits: list[CompiledCircuit]


class AnalyzeRequest(BaseModel):
    term: str
    lengths: list[int] = Field(min_length=1)
    level: int | None = None
    size_deg: int = 3
    depth_deg: int = 2
    size_c: float = 50.0
    depth_c: float = 50.0
    guard_bits: int = DEFAULT_GUARD_BITS


class AnalyzeRow(BaseModel):
    n: int
    size: int
    depth: int
    stages: int
    bound: float
    ok: bool
    why: str


class AnalyzeResponse(BaseModel):
    kind: str
    level: int | None
    passed: bool
    rows: list[AnalyzeRow]


class DiffRequest(BaseModel):
    term: str | None = None
    names: list[str] | None = None
    lengths: list[int] = [8, 16, 32, 64]
    seed: int = 0
    trials: int = 100
    exhaustive_upto: int = 10
    guard_bits: int = DEFAULT_GUARD_BITS


class DiffRowOut(BaseModel):
    name: str
    n: int
    mode: str
    cases: int
    mismatches: int


class DiffResponse(BaseModel):
    passed: bool
    rows: list[DiffRowOut]


class FmtRequest(BaseModel):
    text: str
    kind: str = "auto"


class FmtResponse(BaseModel):
    kind: str
    ok: bool
    canonical: str


class GameRunRequest(BaseModel):
    instance: str
    items: list[int] = Field(min_length=2)
    strategy: str = "cooperative"
    k: int = 1
    level: int | None = None


class GameRoundOut(BaseModel):
    round: int
    candidate: int
    counter: int | None


class GameRunResponse(BaseModel):
    rounds: list[GameRoundOut]
    accepted_round: int | None
    witness: int | None


class GameAdviceRequest(BaseModel):
    instance: str
    l: int = Field(ge=2)
    level: int | None = None
    subset_budget: int = 50000
    samples: int = 64
    seed: int | None = None
    permute_orderings: bool = False


class ShrinkageRow(BaseModel):
    stage: int
    size: int
    helped: int


class GameAdviceResponse(BaseModel):
    pack: str
    degraded: bool
    total_bits: int
    passed: bool
    rows: list[ShrinkageRow]


class GameVerifyRequest(BaseModel):
    instance: str
    pack: str
    level: int | None = None
    permute_orderings: bool = False


class VerifyRow(BaseModel):
    item: int
    witness: int | None
    ok: bool


class GameVerifyResponse(BaseModel):
    passed: bool
    rows: list[VerifyRow]


class StdlibEntry(BaseModel):
    name: str
    kind: str
    level: int | None
    arity: int
    size_c: float
    size_deg: int


class StdlibResponse(BaseModel):
    entries: list[StdlibEntry]
