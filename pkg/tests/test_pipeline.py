import json

import pytest

from cardlab import pipeline
from cardlab.agents import Policy
from cardlab.errors import EngineError, InsufficientPool, MalformedRecord, PolicyUnavailable
from cardlab.pipeline import (MatchupSpec, filter_file, generate, histogram, iter_steps, mix, parse_mix_spec,
                              read_manifest, stats)
from fixtures import SCALED_MIX, pool_file, step_record, synthetic_match, write_records

def test_filter_fixture_count(tmp_path):
    src = write_records(tmp_path / "t.jsonl", synthetic_match())
    out = str(tmp_path / "s.jsonl")
    assert filter_file(src, out) == 3
    kept = list(iter_steps(out))
    assert [r["step"] for r in kept] == [0, 4, 8]
    assert read_manifest(out)["stage"] == "samples"


def test_filter_idempotent(tmp_path):
    src = write_records(tmp_path / "t.jsonl", synthetic_match())
    once, twice = str(tmp_path / "a.jsonl"), str(tmp_path / "b.jsonl")
    filter_file(src, once)
    filter_file(once, twice)
    assert open(once, "rb").read() == open(twice, "rb").read()


def test_filter_in_place(tmp_path):
    src = write_records(tmp_path / "t.jsonl", synthetic_match())
    assert filter_file(src, src) == 3
    assert len(list(iter_steps(src))) == 3


def test_filter_teacher_only(tmp_path):
    recs = synthetic_match()
    for r in recs[1:]:
        r["teacher"] = False
    src = write_records(tmp_path / "t.jsonl", recs)
    assert filter_file(src, str(tmp_path / "s.jsonl"), teacher_only=True) == 0


def test_generated_corpus_has_no_loser_steps(tmp_path):
    for game in ("doudizhu", "uno", "leduc", "gin_rummy"):
        traj = str(tmp_path / f"{game}.jsonl")
        generate(MatchupSpec.teacher_vs(game, "rule", "random", 30, seed=2), traj, workers=1)
        winners = {}
        for _, rec in pipeline.read_records(traj):
            if rec.get("kind") == "match":
                payoffs = rec["payoffs"]
                winners[rec["match_id"]] = {i for i, p in enumerate(payoffs) if p > 0}
        out = str(tmp_path / f"{game}.s.jsonl")
        filter_file(traj, out)
        for rec in iter_steps(out):
            assert rec["seat"] in winners[rec["match_id"]]
            assert len(rec["legal"]) > 1


def test_doudizhu_keeps_both_farmers(tmp_path):
    traj = str(tmp_path / "d.jsonl")
    generate(MatchupSpec.teacher_vs("doudizhu", "rule", "rule", 20, seed=5), traj, workers=1)
    farmer_wins = set()
    for _, rec in pipeline.read_records(traj):
        if rec.get("kind") == "match" and rec["winner_side"] == "farmer":
            farmer_wins.add(rec["match_id"])
    assert farmer_wins
    out = str(tmp_path / "s.jsonl")
    filter_file(traj, out)
    seats = {}
    for rec in iter_steps(out):
        seats.setdefault(rec["match_id"], set()).add(rec["role"])
    assert any(seats.get(m) == {"landlord_up", "landlord_down"} for m in farmer_wins)


def test_guandan_teammate_option(tmp_path):
    traj = str(tmp_path / "g.jsonl")
    generate(MatchupSpec.teacher_vs("guandan", "rule", "rule", 2, seed=1, max_deals=2), traj, workers=1)
    both, lead = str(tmp_path / "both.jsonl"), str(tmp_path / "lead.jsonl")
    n_both = filter_file(traj, both)
    n_lead = filter_file(traj, lead, keep_teammates=False)
    assert 0 < n_lead < n_both
    assert all(r["lead"] for r in iter_steps(lead))
    assert read_manifest(lead)["filter"]["keep_teammates"] is False


def test_zero_games_manifest_only(tmp_path):
    out = tmp_path / "t.jsonl"
    assert generate(MatchupSpec.teacher_vs("uno", "rule", "random", 0), str(out), workers=1) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 and json.loads(lines[0])["kind"] == "manifest"


def test_generate_byte_identical(tmp_path):
    spec = MatchupSpec.teacher_vs("uno", "rule", "random", 12, seed=7)
    a, b, c = (str(tmp_path / f"{k}.jsonl") for k in "abc")
    generate(spec, a, workers=1)
    generate(spec, b, workers=1)
    generate(spec, c, workers=2)
    assert open(a, "rb").read() == open(b, "rb").read() == open(c, "rb").read()


def test_header_and_step_fields(tmp_path):
    out = str(tmp_path / "t.jsonl")
    n = generate(MatchupSpec.teacher_vs("gin_rummy", "rule", "random", 4, seed=1), out, workers=1)
    headers = [r for _, r in pipeline.read_records(out) if r.get("kind") == "match"]
    assert len(headers) == 4 and sum(h["steps"] for h in headers) == n
    # rotation moves the teacher through both seats
    assert [h["teacher_seats"] for h in headers] == [[0], [1], [0], [1]]
    for rec in iter_steps(out):
        assert rec["action"] in rec["legal"]


def test_seat_count_checked():
    with pytest.raises(ValueError):
        MatchupSpec("uno", ["rule"], [0], 1)
    with pytest.raises(ValueError):
        MatchupSpec("leduc", ["rule", "random"], [2], 1)


class _Broken(Policy):
    def act(self, obs, legal, rng):
        raise RuntimeError("boom")


class _Illegal(Policy):
    def act(self, obs, legal, rng):
        return "nonsense"


def test_engine_error_names_match(tmp_path, monkeypatch):
    monkeypatch.setitem(pipeline._POLICY_CACHE, ("broken", pipeline.GameId.LEDUC), _Broken())
    spec = MatchupSpec("leduc", ["broken", "broken"], [0], 3, rotate=False)
    with pytest.raises(EngineError) as info:
        generate(spec, str(tmp_path / "t.jsonl"), workers=1)
    assert info.value.match_id == 0


def test_illegal_policy_output(tmp_path, monkeypatch):
    monkeypatch.setitem(pipeline._POLICY_CACHE, ("bad", pipeline.GameId.LEDUC), _Illegal())
    with pytest.raises(PolicyUnavailable):
        generate(MatchupSpec("leduc", ["bad", "bad"], [0], 1), str(tmp_path / "t.jsonl"), workers=1)


def test_unknown_policy(tmp_path):
    with pytest.raises(PolicyUnavailable):
        generate(MatchupSpec.teacher_vs("uno", "wizard", "random", 1), str(tmp_path / "t.jsonl"), workers=1)


# mixing --------------------------------------------------------------------------------


def test_scaled_mix_exact(tmp_path):
    pools = {g: pool_file(tmp_path / f"{g}.jsonl", g, n + 37) for g, n in SCALED_MIX.items()}
    out = str(tmp_path / "mix.jsonl")
    hist = mix(SCALED_MIX, pools, 0, out)
    assert hist == SCALED_MIX and sum(hist.values()) == 3100
    assert histogram(out) == SCALED_MIX
    ids = [(r["game"], r["match_id"]) for _, r in pipeline.read_records(out) if r.get("kind") != "manifest"]
    assert len(set(ids)) == 3100


def test_paper_counts_total():
    text = "\n".join(f"{g} = {n * 1000}" for g, n in SCALED_MIX.items())
    assert sum(parse_mix_spec(text).values()) == 3_100_000


def test_mix_seeded(tmp_path):
    pools = {"uno": pool_file(tmp_path / "u.jsonl", "uno", 50), "leduc": pool_file(tmp_path / "l.jsonl", "leduc", 50)}
    a, b, c = (str(tmp_path / f"{k}.jsonl") for k in "abc")
    mix({"uno": 20, "leduc": 10}, pools, 1, a)
    mix({"uno": 20, "leduc": 10}, pools, 1, b)
    mix({"uno": 20, "leduc": 10}, pools, 2, c)
    assert open(a, "rb").read() == open(b, "rb").read() != open(c, "rb").read()


def test_insufficientpool_file(tmp_path):
    pools = {"uno": pool_file(tmp_path / "u.jsonl", "uno", 5)}
    with pytest.raises(InsufficientPool) as info:
        mix({"uno": 10}, pools, 0, str(tmp_path / "m.jsonl"))
    assert info.value.game == "uno" and info.value.shortfall == 5
    with pytest.raises(InsufficientPool):
        mix({"leduc": 1}, pools, 0, str(tmp_path / "m.jsonl"))


def test_mix_spec_parsing():
    assert parse_mix_spec("# counts\nuno = 3\n\nleduc=4 # poker\n") == {"uno": 3, "leduc": 4}
    for bad in ("uno 3", "uno = x", "uno = -1"):
        with pytest.raises(MalformedRecord):
            parse_mix_spec(bad)


# statistics ----------------------------------------------------------------------------


def test_stats_fixture(tmp_path):
    recs = []
    for m, n in ((0, 10), (1, 20)):
        recs.append({"kind": "match", "match_id": m, "num_players": 2})
        recs += [step_record(m, i, i % 2, i % 2 == 0, 1 + i % 3) for i in range(n)]
    st = stats(write_records(tmp_path / "t.jsonl", recs))
    assert st.games == 2 and st.avg_steps == 15 and st.avg_steps_per_player == 7.5
    assert st.total_steps == 30
    decisions = [1 + i % 3 for n in (10, 20) for i in range(n) if 1 + i % 3 > 1]
    assert st.avg_legal == sum(decisions) / len(decisions)
    retained = sum(1 for n in (10, 20) for i in range(n) if i % 2 == 0 and 1 + i % 3 > 1)
    assert st.retained_steps == retained
    assert "Avg. Steps per Game" in st.table()


def test_stats_matches_filter(tmp_path):
    traj = str(tmp_path / "t.jsonl")
    generate(MatchupSpec.teacher_vs("uno", "rule", "random", 20, seed=3), traj, workers=1)
    assert stats(traj).retained_steps == filter_file(traj, str(tmp_path / "s.jsonl"))


def test_malformed_record_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    good = json.dumps(step_record(0, 0, 0, True, 2))
    path.write_text(json.dumps(pipeline.manifest("x")) + "\n" + good + "\n{nope\n")
    with pytest.raises(MalformedRecord) as info:
        stats(str(path))
    assert info.value.line == 3
    rec = step_record(0, 0, 0, True, 2)
    del rec["legal"]
    path.write_text(json.dumps(pipeline.manifest("x")) + "\n\n" + json.dumps(rec) + "\n")
    with pytest.raises(MalformedRecord) as info:
        filter_file(str(path), str(tmp_path / "o.jsonl"))
    assert info.value.line == 3


@pytest.mark.slow
def test_doudizhu_retained_per_game(tmp_path):
    traj = str(tmp_path / "d.jsonl")
    generate(MatchupSpec.teacher_vs("doudizhu", "rule", "rule", 1000, seed=0), traj)
    kept = filter_file(traj, str(tmp_path / "s.jsonl"))
    assert 11 <= kept / 1000 <= 19
