"""Seeded trajectory generation, winner filtering, dataset mixing and corpus statistics.

Every file is line-delimited JSON whose first line is a manifest record.
Trajectory files then hold, per match, one ``match`` header followed by its
``step`` records. Sample files (filter output) hold step records only.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from multiprocessing import get_context
from typing import Iterator

from cardlab import __version__
from cardlab.cards import GameId, game_id
from cardlab.core import derive_seed, get_engine, make_rng
from cardlab.errors import EngineError, InsufficientPool, MalformedRecord, PolicyUnavailable
from cardlab.prompts.codec import action_value

TOOL = "cardlab"
_STEP_KEYS = ("game", "match_id", "step", "seat", "role", "obs", "legal", "action", "is_winner")


# --- records ------------------------------------------------------------------------


def dumps(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False)


def manifest(stage: str, **payload) -> dict:
    return {"kind": "manifest", "tool": TOOL, "version": __version__, "stage": stage, **payload}


def read_records(path) -> Iterator[tuple[int, dict]]:
    """Yield (line number, record) for every non-empty line, manifest included."""
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except ValueError as exc:
                raise MalformedRecord(f"invalid JSON: {exc}", line=n) from None
            if not isinstance(rec, dict):
                raise MalformedRecord("record is not a JSON object", line=n)
            yield n, rec


def read_manifest(path) -> dict | None:
    for _, rec in read_records(path):
        return rec if rec.get("kind") == "manifest" else None
    return None


def _check_step(n: int, rec: dict) -> None:
    missing = [k for k in _STEP_KEYS if k not in rec]
    if missing:
        raise MalformedRecord(f"step record lacks {', '.join(missing)}", line=n)
    if not isinstance(rec["legal"], list) or not isinstance(rec["is_winner"], bool):
        raise MalformedRecord("step record has a malformed legal list or winner flag", line=n)


def iter_steps(path) -> Iterator[dict]:
    for n, rec in read_records(path):
        kind = rec.get("kind", "step")
        if kind == "step":
            _check_step(n, rec)
            yield rec


# --- matchups -----------------------------------------------------------------------


@dataclass
class MatchupSpec:
    """Who sits where, for how many games.

    ``seats`` binds every seat to a policy for match 0. With ``rotate`` the
    binding shifts by one seat per match, so each policy plays every seat.
    """

    game: str
    seats: list[str]
    teacher_seats: list[int]
    n_games: int
    seed: int = 0
    rotate: bool = True
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        g = game_id(self.game)
        self.game = g.value
        n = get_engine(g).num_players
        if len(self.seats) != n:
            raise ValueError(f"{g.value} needs {n} seat bindings, got {len(self.seats)}")
        if any(not 0 <= t < n for t in self.teacher_seats):
            raise ValueError(f"teacher seat out of range in {self.teacher_seats}")

    @classmethod
    def teacher_vs(cls, game, teacher: str, opponent: str, n_games: int, seed: int = 0, **options) -> "MatchupSpec":
        """Teacher in the first seat (and its partner seat in Guandan), opponents elsewhere."""
        g = game_id(game)
        n = get_engine(g).num_players
        teacher_seats = [0, 2] if g is GameId.GUANDAN else [0]
        seats = [teacher if i in teacher_seats else opponent for i in range(n)]
        return cls(g.value, seats, teacher_seats, n_games, seed, options=options)

    def seat_plan(self, match_index: int) -> tuple[list[str], set[int]]:
        n = len(self.seats)
        shift = match_index % n if self.rotate else 0
        seats = [self.seats[(i - shift) % n] for i in range(n)]
        teachers = {(t + shift) % n for t in self.teacher_seats}
        return seats, teachers

    def to_json(self) -> dict:
        return asdict(self)


def reset_options(game: GameId, match_index: int) -> dict:
    # alternate the dealer independently of the seat rotation
    if game in (GameId.LEDUC, GameId.LIMIT, GameId.NOLIMIT, GameId.GIN_RUMMY):
        return {"dealer": (match_index // 2) % 2}
    return {}


_POLICY_CACHE: dict = {}


def _policy(binding: str, game):
    from cardlab.agents import resolve_policy

    key = (binding, game)
    if key not in _POLICY_CACHE:
        _POLICY_CACHE[key] = resolve_policy(binding, game)
    return _POLICY_CACHE[key]


def run_match(spec: MatchupSpec, j: int) -> list[dict]:
    """Play match ``j`` and return its header followed by its step records."""
    g = game_id(spec.game)
    engine = get_engine(g, **spec.options)
    bindings, teachers = spec.seat_plan(j)
    policies = [_policy(b, g) for b in bindings]
    match_seed = derive_seed(spec.seed, "match", j)
    rngs = [make_rng(match_seed, "seat", i) for i in range(engine.num_players)]
    steps = []
    deal_of = []
    try:
        state = engine.reset(match_seed, **reset_options(g, j))
        while not state.terminal:
            seat = state.seat
            legal = engine.legal_actions(state)
            obs = engine.observe(state)
            action = policies[seat].act(obs, legal, rngs[seat])
            if action not in legal:
                raise PolicyUnavailable(f"{bindings[seat]} returned illegal action {action!r}")
            steps.append({
                "kind": "step",
                "game": g.value,
                "match_id": j,
                "step": len(steps),
                "seat": seat,
                "role": obs.role,
                "obs": obs.fields,
                "legal": [action_value(g, a) for a in legal],
                "action": action_value(g, action),
                "is_winner": False,
                "teacher": seat in teachers,
            })
            deal_of.append(len(getattr(state, "deal_results", ())))
            state = engine.step(state, action)
        payoffs = engine.payoffs(state)
    except PolicyUnavailable:
        raise
    except Exception as exc:
        raise EngineError(j, exc) from exc

    header = {
        "kind": "match",
        "game": g.value,
        "match_id": j,
        "seed": match_seed,
        "num_players": engine.num_players,
        "seats": bindings,
        "teacher_seats": sorted(teachers),
        "payoffs": payoffs,
        "winner_side": engine.winner_side(state),
        "steps": len(steps),
    }
    if g is GameId.GUANDAN:
        deals = state.deal_results
        header["deals"] = [{"team": d["team"], "order": d["order"]} for d in deals]
        for rec, d in zip(steps, deal_of):
            rec["deal"] = d
            rec["is_winner"] = rec["seat"] % 2 == deals[d]["team"]
            rec["lead"] = rec["seat"] == deals[d]["order"][0]
    else:
        winners = engine.winners(state)
        for rec in steps:
            rec["is_winner"] = rec["seat"] in winners
    return [header] + steps


def _match_task(args):
    spec_json, j = args
    return run_match(MatchupSpec(**spec_json), j)


def default_workers() -> int:
    env = os.environ.get("CARDLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _with_config(head: dict, run_config: dict | None) -> dict:
    if run_config is not None:
        head["config"] = run_config
    return head


def generate(spec: MatchupSpec, out_path, workers: int | None = None, run_config: dict | None = None) -> int:
    """Write a trajectory file for ``spec``; returns the number of step records.

    Matches may run in parallel, but records are written in match order, so
    the output bytes do not depend on the worker count.
    """
    workers = workers or default_workers()
    for b in set(spec.seats):
        _policy(b, game_id(spec.game))
    total = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        head = manifest("trajectories", command="gen", spec=spec.to_json())
        fh.write(dumps(_with_config(head, run_config)) + "\n")
        tasks = ((spec.to_json(), j) for j in range(spec.n_games))
        if workers > 1 and spec.n_games > 1:
            with get_context("spawn").Pool(workers) as pool:
                results = pool.imap(_match_task, tasks, chunksize=16)
                total = _write_matches(fh, results)
        else:
            total = _write_matches(fh, map(_match_task, tasks))
    return total


def _write_matches(fh, results) -> int:
    total = 0
    for records in results:
        for rec in records:
            fh.write(dumps(rec) + "\n")
        total += len(records) - 1
    return total


# --- filtering ----------------------------------------------------------------------


def keep_step(rec: dict, teacher_only: bool = False, keep_teammates: bool = True) -> bool:
    if not rec["is_winner"] or len(rec["legal"]) <= 1:
        return False
    if teacher_only and not rec.get("teacher", True):
        return False
    if not keep_teammates and rec["game"] == GameId.GUANDAN.value and not rec.get("lead", True):
        return False
    return True


def filter_file(in_path, out_path, teacher_only: bool = False, keep_teammates: bool = True,
                run_config: dict | None = None) -> int:
    """Keep winning-side steps that had a real choice; returns the number kept.

    Applying the filter to its own output reproduces it byte for byte.
    """
    source = read_manifest(in_path) or {}
    settings = {"teacher_only": teacher_only, "keep_teammates": keep_teammates}
    head = manifest("samples", command="filter", spec=source.get("spec"),
                    filter=source.get("filter") if source.get("stage") == "samples" else settings)
    _with_config(head, run_config)
    kept = 0
    with open(out_path + ".tmp" if str(out_path) == str(in_path) else out_path, "w", encoding="utf-8") as fh:
        fh.write(dumps(head) + "\n")
        for rec in iter_steps(in_path):
            if keep_step(rec, teacher_only, keep_teammates):
                fh.write(dumps(rec) + "\n")
                kept += 1
    if str(out_path) == str(in_path):
        os.replace(str(out_path) + ".tmp", out_path)
    return kept


# --- mixing -------------------------------------------------------------------------


def parse_mix_spec(text: str) -> dict[str, int]:
    """``game = count`` lines; blank lines and ``#`` comments are ignored."""
    counts = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise MalformedRecord(f"expected 'game = count', got {raw!r}", line=n)
        try:
            count = int(value.strip())
        except ValueError:
            raise MalformedRecord(f"count is not an integer: {value.strip()!r}", line=n) from None
        if count < 0:
            raise MalformedRecord(f"negative count {count}", line=n)
        counts[game_id(name).value] = count
    return counts


def _pool_records(path, game: str) -> list[dict]:
    out = []
    for n, rec in read_records(path):
        if rec.get("kind") in ("manifest", "match"):
            continue
        rec.pop("kind", None)
        rec.setdefault("game", game)
        if rec["game"] != game:
            raise MalformedRecord(f"pool for {game} holds a {rec['game']} record", line=n)
        out.append(rec)
    return out


def mix(counts: dict, pools: dict, seed: int, out_path, run_config: dict | None = None) -> dict[str, int]:
    """Sample exact per-game counts without replacement and shuffle them together.

    Pools are opaque sample or SFT files, so externally produced data (for a
    game without an engine) can join the mixture.
    """
    counts = {game_id(g).value: int(n) for g, n in counts.items()}
    pools = {game_id(g).value: p for g, p in pools.items()}
    picked = []
    for g, n in counts.items():
        if n == 0:
            continue
        if g not in pools:
            raise InsufficientPool(g, n, 0)
        records = _pool_records(pools[g], g)
        if len(records) < n:
            raise InsufficientPool(g, n, len(records))
        rng = make_rng(seed, "mix", g)
        picked.extend(records[i] for i in sorted(rng.sample(range(len(records)), n)))
    make_rng(seed, "shuffle").shuffle(picked)
    with open(out_path, "w", encoding="utf-8") as fh:
        head = manifest("mixed", command="mix", counts=counts, seed=seed)
        fh.write(dumps(_with_config(head, run_config)) + "\n")
        for rec in picked:
            fh.write(dumps(rec) + "\n")
    return histogram(out_path)


def histogram(path) -> dict[str, int]:
    out: dict[str, int] = {}
    for _, rec in read_records(path):
        if rec.get("kind") == "manifest":
            continue
        out[rec["game"]] = out.get(rec["game"], 0) + 1
    return out


# --- statistics ---------------------------------------------------------------------


@dataclass
class MatchStats:
    games: int
    avg_steps: float
    avg_steps_per_player: float
    retained_steps: int
    total_steps: int
    # mean |legal| over decision steps (more than one legal action)
    avg_legal: float
    # mean |legal| over every step, forced ones included
    avg_legal_all_steps: float

    def to_json(self) -> dict:
        return asdict(self)

    def table(self) -> str:
        rows = [
            ("Games", f"{self.games}"),
            ("Avg. Steps per Game", f"{self.avg_steps:.2f}"),
            ("Avg. Steps per Player per Game", f"{self.avg_steps_per_player:.2f}"),
            ("Total Retained Steps", f"{self.retained_steps}"),
            ("Avg. Legal Actions per Step", f"{self.avg_legal:.2f}"),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>10}" for k, v in rows)


def stats(path, players: int | None = None) -> MatchStats:
    matches = {}
    total = retained = decisions = legal_sum = legal_all = 0
    for n, rec in read_records(path):
        kind = rec.get("kind", "step")
        if kind == "match":
            players = players or rec.get("num_players")
            matches.setdefault(rec["match_id"], 0)
        elif kind == "step":
            _check_step(n, rec)
            matches[rec["match_id"]] = matches.get(rec["match_id"], 0) + 1
            k = len(rec["legal"])
            total += 1
            legal_all += k
            if k > 1:
                decisions += 1
                legal_sum += k
                if rec["is_winner"]:
                    retained += 1
    games = len(matches)
    if players is None:
        first = next(iter_steps(path), None)
        players = get_engine(first["game"]).num_players if first else 1
    avg = total / games if games else 0.0
    return MatchStats(
        games=games,
        avg_steps=avg,
        avg_steps_per_player=avg / players,
        retained_steps=retained,
        total_steps=total,
        avg_legal=legal_sum / decisions if decisions else 0.0,
        avg_legal_all_steps=legal_all / total if total else 0.0,
    )
