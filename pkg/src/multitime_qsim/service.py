"""HTTP facade over the parser, the engines and the corpus generator.

The CLI talks to this app in-process by default, so the service is the
single code path for running scripts whether or not a server is up.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI
from pydantic import BaseModel, Field

from . import __version__
from .corpus import generate_documents
from .runner import run_document
from .script import parse
from .tensors import DEFAULT_TOLERANCE, Tolerance


class DiagnosticModel(BaseModel):
    line: int
    col: int
    code: str
    message: str


class ParseRequest(BaseModel):
    text: str


class ParseResponse(BaseModel):
    valid: bool
    statements: int
    diagnostics: list[DiagnosticModel]


class RunRequest(BaseModel):
    text: str
    engine: Literal["multitime", "oracle", "both"] = "multitime"
    # overrides the probability agreement tolerance when given
    tolerance: float | None = Field(default=None, gt=0.0, le=1e-6)


class RowModel(BaseModel):
    outcome: list[str]
    probability: float
    relative_weight: float


class RunResponse(BaseModel):
    exit_code: int
    report: str
    records: list[str]
    rows: list[RowModel]
    max_discrepancy: float | None
    diagnostics: list[DiagnosticModel]
    error: str | None


class CorpusRequest(BaseModel):
    count: int = Field(default=10, ge=1, le=2000)
    max_dim: int = Field(default=4, ge=2, le=6)
    seed: int = 0


class CorpusResponse(BaseModel):
    documents: list[str]


def create_app() -> FastAPI:
    app = FastAPI(title="multitime-qsim", version=__version__)

    @app.get("/v1/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.post("/v1/parse", response_model=ParseResponse)
    def parse_script(request: ParseRequest) -> ParseResponse:
        doc = parse(request.text)
        return ParseResponse(
            valid=doc.valid,
            statements=len(doc.statements),
            diagnostics=[DiagnosticModel(**vars(d)) for d in doc.diagnostics],
        )

    @app.post("/v1/run", response_model=RunResponse)
    def run_script(request: RunRequest) -> RunResponse:
        tol = DEFAULT_TOLERANCE
        if request.tolerance is not None:
            tol = Tolerance(eq_tol=DEFAULT_TOLERANCE.eq_tol, prob_tol=request.tolerance)
        result = run_document(parse(request.text), request.engine, tol)
        return RunResponse(
            exit_code=result.exit_code,
            report=result.report,
            records=list(result.records),
            rows=[
                RowModel(outcome=list(key), probability=p, relative_weight=r)
                for key, p, r in result.rows
            ],
            max_discrepancy=result.max_discrepancy,
            diagnostics=[DiagnosticModel(**vars(d)) for d in result.diagnostics],
            error=result.error,
        )

    @app.post("/v1/corpus/generate", response_model=CorpusResponse)
    def corpus_generate(request: CorpusRequest) -> CorpusResponse:
        return CorpusResponse(
            documents=generate_documents(request.count, request.max_dim, request.seed)
        )

    return app


app = create_app()
