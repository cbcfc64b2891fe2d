import json
from itertools import islice
from pathlib import Path

import pytest

from cardlab import pipeline
from cardlab.cards import ALL_GAMES, ENGINE_GAMES
from cardlab.core import get_engine
from cardlab.errors import MalformedRecord, MissingField, ParseError, SchemaMismatch, UnknownAction
from cardlab.games.guandan import PASS
from cardlab.pipeline import MatchupSpec, filter_file, generate
from cardlab.prompts import decode_action, encode_action, load_template, render
from cardlab.prompts.codec import action_from_value, action_value
from cardlab.prompts.render import legal_line
from cardlab.prompts.sft import emit_sft, output_in_legal
from conftest import random_states

GOLDEN = Path(__file__).parent / "golden"
TEMPLATES = Path(__file__).parent.parent / "src" / "cardlab" / "prompts" / "templates"
ALL = [g.value for g in ALL_GAMES]


def golden_obs(game):
    return json.loads((GOLDEN / f"{game}.obs.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("game", ALL)
def test_golden_instruction(game):
    expected = (GOLDEN / f"{game}.txt").read_bytes()
    assert render(game, golden_obs(game)).encode("utf-8") == expected


@pytest.mark.parametrize("game", ALL)
def test_empty_slots_reproduce_template(game):
    template = load_template(game)
    blank = template.fill({key: "" for _, key in template.slots})
    assert blank.encode("utf-8") == (TEMPLATES / f"{game}.txt").read_bytes()
    assert blank == template.text


@pytest.mark.parametrize("game", ALL)
def test_preamble_prefix(game):
    template = load_template(game)
    text = render(game, golden_obs(game))
    assert text.startswith(template.preamble)
    assert template.preamble.startswith("You are now a player in a game of ")
    assert (GOLDEN / f"{game}.txt").read_text(encoding="utf-8").startswith(template.preamble)


def test_missing_field_names_slot():
    obs = golden_obs("uno")
    del obs["top_card"]
    with pytest.raises(MissingField) as info:
        render("uno", obs)
    assert info.value.slot == "top_card"


def test_leduc_first_round_public_card():
    engine = get_engine("leduc")
    s = engine.reset(4)
    assert "3. Public card  (if in round 2): None\n" in render("leduc", engine.observe(s))


def test_doudizhu_roles_rendered():
    engine = get_engine("doudizhu")
    s = engine.reset(2)
    seen = set()
    for _ in range(3):
        text = render("doudizhu", engine.observe(s))
        line = next(l for l in text.split("\n") if l.startswith("1. Your role:"))
        seen.add(line)
        s = engine.step(s, engine.legal_actions(s)[-1])
    assert seen == {f"1. Your role: {r}" for r in ("landlord", "landlord_down", "landlord_up")}


def test_legal_line_extraction():
    text = render("leduc", golden_obs("leduc"))
    assert legal_line(text) == '["fold", "call", "raise"]'


# codec ---------------------------------------------------------------------------------


def test_doudizhu_codec_examples():
    assert encode_action("doudizhu", (3, 3, 3)) == '{"action": [3, 3, 3]}'
    assert encode_action("doudizhu", ()) == '{"action": []}'
    assert decode_action("doudizhu", '{"action": []}') == ()
    assert decode_action("doudizhu", '{"action": [3, 3, 3]}') == (3, 3, 3)


def test_string_codec_examples():
    assert decode_action("leduc", '{"action": "call"}') == "call"
    assert encode_action("gin_rummy", "discard 3S") == '{"action": "discard 3S"}'
    assert decode_action("nolimit", '{"action": "RAISE_HALF_POT"}') == "RAISE_HALF_POT"
    assert decode_action("mahjong", '{"action": "dahai: 5pr"}') == "dahai: 5pr"


def test_guandan_codec():
    assert json.loads(encode_action("guandan", PASS)) == {"action": ["PASS", "PASS", "PASS"]}
    value = ["Pair", "5", ["S5", "H5"]]
    combo = decode_action("guandan", json.dumps({"action": value}))
    assert action_value("guandan", combo) == value


@pytest.mark.parametrize("game,text,error", [
    ("leduc", "call", ParseError),
    ("leduc", '{"act": "call"}', SchemaMismatch),
    ("leduc", '["call"]', SchemaMismatch),
    ("leduc", '{"action": 3}', SchemaMismatch),
    ("leduc", '{"action": "bet"}', UnknownAction),
    ("doudizhu", '{"action": "3"}', SchemaMismatch),
    ("doudizhu", '{"action": [3, 99]}', UnknownAction),
    ("doudizhu", '{"action": [3.0]}', SchemaMismatch),
    ("uno", '{"action": "p-3"}', UnknownAction),
    ("gin_rummy", '{"action": "discard 1S"}', UnknownAction),
    ("guandan", '{"action": ["Pair", "5"]}', SchemaMismatch),
    ("guandan", '{"action": ["Quad", "5", ["S5"]]}', UnknownAction),
    ("guandan", '{"action": ["Single", "5", ["X5"]]}', UnknownAction),
])
def test_decode_errors(game, text, error):
    with pytest.raises(error):
        decode_action(game, text)


@pytest.mark.parametrize("game", [g.value for g in ENGINE_GAMES])
def test_codec_round_trip(game):
    kw = {"max_deals": 1} if game == "guandan" else {}
    n = 0
    for engine, state in islice(random_states(game, 10**6, seed=6, **kw), 3000):
        for a in engine.legal_actions(state):
            assert decode_action(game, encode_action(game, a)) == a
            assert action_from_value(game, json.loads(json.dumps(action_value(game, a)))) == a
            n += 1
    assert n >= 3000


@pytest.mark.slow
@pytest.mark.parametrize("game", [g.value for g in ENGINE_GAMES])
def test_render_total(game):
    kw = {"max_deals": 1} if game == "guandan" else {}
    for engine, state in random_states(game, 10_000, seed=8, **kw):
        text = render(game, engine.observe(state))
        assert json.loads(legal_line(text)) == [action_value(game, a) for a in engine.legal_actions(state)]


# SFT -----------------------------------------------------------------------------------


def _samples(tmp_path, game, n_games, seed=0, **options):
    traj = str(tmp_path / f"{game}.t.jsonl")
    generate(MatchupSpec.teacher_vs(game, "rule", "random", n_games, seed=seed, **options), traj, workers=1)
    samples = str(tmp_path / f"{game}.s.jsonl")
    filter_file(traj, samples)
    return samples


def test_emit_sft_bijection(tmp_path):
    samples = _samples(tmp_path, "leduc", 20)
    recs = [r for _, r in pipeline.read_records(samples) if r.get("kind") == "step"][:3]
    small = tmp_path / "three.jsonl"
    small.write_text(json.dumps(pipeline.manifest("samples")) + "\n" + "".join(json.dumps(r) + "\n" for r in recs))
    out = str(tmp_path / "sft.jsonl")
    assert emit_sft(str(small), out) == 3
    rows = [r for _, r in pipeline.read_records(out) if r.get("kind") != "manifest"]
    assert [(r["metadata"]["match_id"], r["metadata"]["step"]) for r in rows] == \
        [(r["match_id"], r["step"]) for r in recs]
    assert set(rows[0]) == {"instruction", "output", "metadata"}


@pytest.mark.parametrize("game", [g.value for g in ENGINE_GAMES])
def test_sft_outputs_in_legal_list(tmp_path, game):
    options = {"max_deals": 1} if game == "guandan" else {}
    samples = _samples(tmp_path, game, 2 if game == "guandan" else 15, **options)
    out = str(tmp_path / "sft.jsonl")
    n = emit_sft(samples, out)
    assert n > 0
    for _, rec in pipeline.read_records(out):
        if rec.get("kind") == "manifest":
            continue
        assert output_in_legal(rec)
        decode_action(game, rec["output"])


def test_emit_sft_malformed(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(pipeline.manifest("samples")) + "\n" +
                    json.dumps({"kind": "step", "game": "uno", "match_id": 0, "step": 0, "seat": 0,
                                "role": "x", "obs": {}, "legal": [], "action": "draw"}) + "\n")
    with pytest.raises(MalformedRecord) as info:
        emit_sft(str(path), str(tmp_path / "o.jsonl"))
    assert info.value.line == 2
