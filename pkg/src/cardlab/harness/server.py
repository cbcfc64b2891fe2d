"""Reference HTTP policy endpoint: serves any local policy over the wire protocol."""

from __future__ import annotations

import argparse

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from cardlab.agents import resolve_policy
from cardlab.errors import CardLabError
from cardlab.harness.endpoints import answer


class ActRequest(BaseModel):
    game: str
    seat: int
    match_id: int = 0
    step: int = 0
    prompt: str = ""
    observation: dict
    legal_actions: list


def create_app(binding: str, game: str) -> FastAPI:
    policy = resolve_policy(binding, game)
    app = FastAPI(title="cardlab policy endpoint")

    @app.get("/health")
    def health():
        return {"ok": True, "game": game, "policy": binding}

    @app.post("/act")
    def act(req: ActRequest):
        if not req.legal_actions:
            raise HTTPException(status_code=422, detail="legal_actions is empty")
        try:
            return answer(policy, req.model_dump())
        except CardLabError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    return app


def main(argv=None) -> int:
    import uvicorn

    ap = argparse.ArgumentParser(description="Serve a local policy at POST /act.")
    ap.add_argument("--game", required=True)
    ap.add_argument("--policy", default="rule")
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8000)
    args = ap.parse_args(argv)
    uvicorn.run(create_app(args.policy, args.game), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
