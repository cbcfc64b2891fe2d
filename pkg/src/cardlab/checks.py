"""Randomized engine property checks: legality, card conservation, determinism, termination."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from multiprocessing import get_context

from cardlab.cards import GameId, game_id
from cardlab.core import derive_seed, get_engine, make_rng

# per-deal bound for Guandan, per-game bound otherwise
STEP_BOUNDS = {
    GameId.DOUDIZHU: 200,
    GameId.GUANDAN: 600,
    GameId.UNO: 2000,
    GameId.GIN_RUMMY: 120,
    GameId.LEDUC: 30,
    GameId.LIMIT: 30,
    GameId.NOLIMIT: 30,
}


@dataclass
class CheckReport:
    game: str
    games: int = 0
    steps: int = 0
    actions_applied: int = 0
    max_steps: int = 0
    failures: list[str] = field(default_factory=list)

    def merge(self, other: "CheckReport") -> None:
        self.games += other.games
        self.steps += other.steps
        self.actions_applied += other.actions_applied
        self.max_steps = max(self.max_steps, other.max_steps)
        self.failures.extend(other.failures)

    @property
    def ok(self) -> bool:
        return not self.failures


def _same_cards(a, b) -> bool:
    # plain dict equality is much faster than Counter.__eq__ and equivalent here
    return dict.__eq__(a, b)


def _distinct(actions) -> set:
    try:
        return set(actions)
    except TypeError:  # list-valued actions
        return set(map(repr, actions))


def _engine_for(game: GameId, max_deals: int):
    if game is GameId.GUANDAN:
        return get_engine(game, max_deals=max_deals)
    return get_engine(game)


def check_rollouts(game, seed: int, n_games: int, apply_all: bool = True, max_deals: int = 1) -> CheckReport:
    """Random-play ``n_games`` matches from ``seed`` and record every property violation.

    A Guandan game is ``max_deals`` deals; later deals exercise tribute.
    """
    g = game_id(game)
    engine = _engine_for(g, max_deals)
    deck = engine.full_deck()
    bound = STEP_BOUNDS[g]
    rep = CheckReport(g.value)
    for j in range(n_games):
        match_seed = derive_seed(seed, j)
        tag = f"{g.value} seed={seed} game={j}"
        rng = make_rng(match_seed, "policy")
        state = engine.reset(match_seed)
        actions = []
        segment = 0
        try:
            while not state.terminal:
                if not _same_cards(engine.card_zones(state), deck):
                    rep.failures.append(f"{tag} step={len(actions)}: card conservation")
                    break
                legal = engine.legal_actions(state)
                if not legal or len(_distinct(legal)) != len(legal):
                    rep.failures.append(f"{tag} step={len(actions)}: empty or duplicated legal list")
                    break
                if apply_all:
                    for a in legal:
                        engine.step(state, a)
                    rep.actions_applied += len(legal)
                action = legal[rng.randrange(len(legal))]
                deals_before = len(getattr(state, "deal_results", ()))
                state = engine.step(state, action)
                actions.append(action)
                segment += 1
                if len(getattr(state, "deal_results", ())) != deals_before:
                    segment = 0
                if segment > bound:
                    rep.failures.append(f"{tag}: exceeded step bound {bound}")
                    break
        except Exception as exc:  # any engine error is a reported failure
            rep.failures.append(f"{tag} step={len(actions)}: {type(exc).__name__}: {exc}")
            continue
        if not state.terminal:
            continue
        if not _same_cards(engine.card_zones(state), deck):
            rep.failures.append(f"{tag}: card conservation at terminal")
        pay = engine.payoffs(state)
        if engine.num_players == 2 and abs(sum(pay)) > 1e-9:
            rep.failures.append(f"{tag}: payoffs {pay} not antisymmetric")
        if g in (GameId.DOUDIZHU, GameId.GUANDAN) and engine.winner_side(state) is None:
            rep.failures.append(f"{tag}: no winning side")
        replay = engine.replay(match_seed, actions)
        if engine.state_hash(replay) != engine.state_hash(state):
            rep.failures.append(f"{tag}: replay diverged")
        rep.games += 1
        rep.steps += len(actions)
        rep.max_steps = max(rep.max_steps, len(actions))
    return rep


def _task(args):
    return check_rollouts(*args)


def default_workers() -> int:
    env = os.environ.get("CARDLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_property_suite(games, seeds=range(100), games_per_seed: int = 100, workers: int | None = None,
                       apply_all: bool = True) -> dict[str, CheckReport]:
    """Run ``check_rollouts`` for every (game, seed) pair, in parallel when workers > 1."""
    tasks = [(game_id(g).value, s, games_per_seed, apply_all) for g in games for s in seeds]
    workers = workers or default_workers()
    if workers > 1:
        with get_context("spawn").Pool(workers) as pool:
            parts = pool.map(_task, tasks, chunksize=1)
    else:
        parts = [_task(t) for t in tasks]
    out: dict[str, CheckReport] = {}
    for p in parts:
        out.setdefault(p.game, CheckReport(p.game)).merge(p)
    return out
