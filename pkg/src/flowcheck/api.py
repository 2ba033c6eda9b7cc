"""HTTP checking service: the core pipeline behind a small FastAPI app."""
from __future__ import annotations

import json
from typing import Literal

from fastapi import FastAPI
from pydantic import BaseModel, Field

from .checker import check_programs


class CheckRequest(BaseModel):
    source: str
    prelude: str | None = None
    mode: Literal["compact", "verbose"] = "compact"
    max_errors: int | None = Field(default=None, ge=0)


class LocationModel(BaseModel):
    file: int
    startLine: int
    startCol: int
    endLine: int
    endCol: int
    builtin: bool


class SegmentModel(BaseModel):
    type: str
    role: str
    depth: int
    locations: list[LocationModel]


class HeadlineModel(BaseModel):
    lhs: str
    rhs: str


class ErrorModel(BaseModel):
    headline: HeadlineModel
    level: int
    summary: str | None
    segments: list[SegmentModel]


class CheckResponse(BaseModel):
    exit_code: int
    text: str
    errors: list[ErrorModel]


app = FastAPI(title="flowcheck", description="Flow-based type error reports for a mini-ML language")


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/check", response_model=CheckResponse)
def check(request: CheckRequest) -> CheckResponse:
    outcome = check_programs(
        [("<input>", request.source)],
        prelude_text=request.prelude,
        mode=request.mode,
        max_errors=request.max_errors,
    )
    errors = []
    if outcome.json_doc:
        errors = json.loads(outcome.json_doc)["errors"]
    return CheckResponse(exit_code=outcome.exit_code, text=outcome.text, errors=errors)
