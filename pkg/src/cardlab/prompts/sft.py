"""Turn filtered step records into instruction/output pairs."""

from __future__ import annotations

import json

from cardlab.errors import MalformedRecord
from cardlab.pipeline import _with_config, dumps, manifest, read_manifest, read_records
from cardlab.prompts.codec import action_from_value, encode_action
from cardlab.prompts.render import render


def sft_record(rec: dict) -> dict:
    game = rec["game"]
    instruction = render(game, rec["obs"])
    output = encode_action(game, action_from_value(game, rec["action"]))
    meta = {"game": game, "match_id": rec["match_id"], "step": rec["step"], "seat": rec["seat"], "role": rec["role"]}
    return {"instruction": instruction, "output": output, "metadata": meta}


def emit_sft(in_path, out_path, run_config: dict | None = None) -> int:
    """One SFT record per sample record; returns the number written."""
    source = read_manifest(in_path) or {}
    n = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        head = manifest("sft", command="render", spec=source.get("spec"), filter=source.get("filter"))
        fh.write(dumps(_with_config(head, run_config)) + "\n")
        for line, rec in read_records(in_path):
            if rec.get("kind", "step") != "step":
                continue
            try:
                out = sft_record(rec)
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedRecord(f"cannot render sample: {exc!r}", line=line) from None
            fh.write(dumps(out) + "\n")
            n += 1
    return n


def output_in_legal(record: dict) -> bool:
    """True when the output's action value appears in the instruction's legal list."""
    from cardlab.prompts.render import legal_line

    value = json.loads(record["output"])["action"]
    line = legal_line(record["instruction"])
    return value in json.loads(line) and json.dumps(value, ensure_ascii=False) in line
