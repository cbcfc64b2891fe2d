"""Serve a local policy over stdin/stdout, one JSON request and reply per line."""

from __future__ import annotations

import argparse
import json
import sys

from cardlab.agents import resolve_policy
from cardlab.errors import CardLabError
from cardlab.harness.endpoints import answer


def serve(policy, stdin=sys.stdin, stdout=sys.stdout) -> None:
    for line in stdin:
        if not line.strip():
            continue
        try:
            reply = answer(policy, json.loads(line))
        except (CardLabError, ValueError, KeyError) as exc:
            reply = {"error": str(exc)}
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Answer policy requests on stdin.")
    ap.add_argument("--game", required=True)
    ap.add_argument("--policy", default="rule")
    args = ap.parse_args(argv)
    serve(resolve_policy(args.policy, args.game))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
