"""Hand-built record fixtures shared by the pipeline and acceptance tests."""

import json

from cardlab import pipeline


def step_record(match_id, step, seat, winner, n_legal, game="leduc"):
    legal = ["fold", "call", "raise"][:n_legal]
    return {"kind": "step", "game": game, "match_id": match_id, "step": step, "seat": seat,
            "role": f"seat_{seat}", "obs": {}, "legal": legal, "action": legal[0], "is_winner": winner,
            "teacher": seat == 0}


def write_records(path, records, stage="trajectories"):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(pipeline.manifest(stage)) + "\n")
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return str(path)


def synthetic_match():
    """One match: the winner (seat 0) has 5 steps, two of them forced; the loser has 4."""
    winner_legal = [3, 1, 2, 1, 3]
    loser_legal = [2, 3, 1, 2]
    steps = []
    for i in range(9):
        if i % 2 == 0:
            steps.append(step_record(0, i, 0, True, winner_legal[i // 2]))
        else:
            steps.append(step_record(0, i, 1, False, loser_legal[i // 2]))
    header = {"kind": "match", "game": "leduc", "match_id": 0, "seed": 0, "num_players": 2,
              "seats": ["rule", "random"], "teacher_seats": [0], "payoffs": [1.0, -1.0],
              "winner_side": "seat_0", "steps": 9}
    return [header] + steps


# the eight-game mixture, at one thousandth of full scale
SCALED_MIX = {"doudizhu": 700, "guandan": 950, "mahjong": 650, "uno": 200, "gin_rummy": 50,
              "leduc": 250, "limit": 200, "nolimit": 100}


def pool_file(path, game, n):
    """A sample file of ``n`` distinct records for one game."""
    recs = [{"kind": "step", "game": game, "match_id": i, "step": 0, "seat": 0, "role": "x", "obs": {},
             "legal": ["a", "b"], "action": "a", "is_winner": True} for i in range(n)]
    return write_records(path, recs, stage="samples")
