"""Stateless HTTP front end.

``POST /optimize`` takes a self-contained request (inline scenario document,
variant, population, generations, seed) and answers with the final archive.
Nothing is kept between requests, so identical bodies get identical answers.

Run with ``python -m valuesched.service`` (address from ``--addr`` or the
``VALUESCHED_ADDR`` environment variable, ``host:port``).
"""

from __future__ import annotations

import argparse
import json
import os
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import Response
from pydantic import BaseModel, Field, ValidationError

from valuesched import __version__
from valuesched.harness import representative_point
from valuesched.model import ScenarioFormatError, scenario_from_dict, validate_scenario
from valuesched.moead import MoeadConfig, run

DEFAULT_ADDR = "127.0.0.1:8080"


class OptimizeRequest(BaseModel):
    scenario: dict
    variant: Literal["standard", "selection"] = "standard"
    population: int = Field(300, ge=2)
    generations: int = Field(500, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)


def _json(status: int, doc) -> Response:
    return Response(json.dumps(doc, indent=None, separators=(",", ":")), status_code=status, media_type="application/json")


def optimize_document(req: OptimizeRequest) -> dict:
    s = scenario_from_dict(req.scenario)
    cfg = MoeadConfig(
        population=req.population,
        generations=req.generations,
        neighborhood_t=min(20, req.population),
        seed=req.seed,
    )
    archive = run(s, cfg, req.variant)
    rep = representative_point(archive)

    def entry(e):
        return {
            "makespan_s": e.objectives.makespan_s,
            "profit": e.objectives.total_profit,
            "elements_produced": e.elements_produced,
            "genome": e.chromosome.to_string(),
        }

    return {
        "version": __version__,
        "variant": req.variant,
        "archive": [entry(e) for e in archive],
        "representative": entry(rep),
    }


def create_app(max_generations: int = 500, max_population: int = 300, max_body_bytes: int = 1_000_000) -> FastAPI:
    app = FastAPI(title="valuesched", version=__version__)

    @app.get("/health")
    def health() -> Response:
        return _json(200, {"status": "ok", "version": __version__})

    @app.post("/optimize")
    async def optimize(request: Request) -> Response:
        body = await request.body()
        if len(body) > max_body_bytes:
            return _json(413, {"error": f"request body exceeds {max_body_bytes} bytes"})
        try:
            req = OptimizeRequest.model_validate_json(body)
        except ValidationError as e:
            return _json(422, {"error": "malformed request", "detail": json.loads(e.json(include_url=False))})
        if req.generations > max_generations or req.population > max_population:
            return _json(
                422,
                {"error": f"generations <= {max_generations} and population <= {max_population} required"},
            )
        try:
            s = scenario_from_dict(req.scenario)
        except ScenarioFormatError as e:
            return _json(422, {"error": "malformed scenario", "detail": str(e)})
        problems = validate_scenario(s)
        if problems:
            return _json(400, {"error": "invalid scenario", "violations": [str(p) for p in problems]})
        doc = await run_in_threadpool(optimize_document, req)
        return _json(200, doc)

    return app


app = create_app()


def main(argv: list[str] | None = None) -> None:
    import uvicorn

    p = argparse.ArgumentParser(prog="valuesched-serve")
    p.add_argument("--addr", default=os.environ.get("VALUESCHED_ADDR", DEFAULT_ADDR), help="host:port")
    args = p.parse_args(argv)
    host, _, port = args.addr.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
