"""Match scheduling and metrics for a subject policy against an opponent.

DouDizhu reports a win rate averaged over the two roles, with the subject
holding the landlord seat in half of the games and both farmer seats in the
other half. Guandan reports the share of deals won by the subject's team.
Every two-player game reports the subject's mean normalized payoff, with the
subject's seat and the dealer alternating independently.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from cardlab.agents import resolve_policy
from cardlab.cards import GameId, game_id
from cardlab.core import derive_seed, get_engine, make_rng
from cardlab.errors import EmptyResults, TransportError
from cardlab.pipeline import reset_options

WIN_RATE, ROUND_WIN_RATE, MEAN_REWARD = "win_rate", "round_win_rate", "mean_reward"


@dataclass
class MetricReport:
    game: str
    games: int
    metric: str
    value: float
    per_role: dict = field(default_factory=dict)
    fallbacks: int = 0
    retries: int = 0
    stderr: float | None = None
    partial: bool = False
    error: str | None = None

    def to_json(self) -> dict:
        return asdict(self)


def metric_kind(game) -> str:
    g = game_id(game)
    if g is GameId.DOUDIZHU:
        return WIN_RATE
    if g is GameId.GUANDAN:
        return ROUND_WIN_RATE
    return MEAN_REWARD


def role_plan(game, n_games: int) -> list[str]:
    """The subject's role in each match."""
    g = game_id(game)
    if g is GameId.DOUDIZHU:
        return ["landlord" if j < (n_games + 1) // 2 else "farmer" for j in range(n_games)]
    if g is GameId.GUANDAN:
        return [f"team_{j % 2}" for j in range(n_games)]
    return [f"seat_{j % 2}" for j in range(n_games)]


def subject_seats(game, role: str) -> set[int]:
    g = game_id(game)
    if g is GameId.DOUDIZHU:
        return {0} if role == "landlord" else {1, 2}
    if g is GameId.GUANDAN:
        team = int(role[-1])
        return {team, team + 2}
    return {int(role[-1])}


def compute_win_rate(results: list[dict], plan: str = "plain") -> float:
    """Win rate from ``{"role", "win"}`` results.

    With the ``doudizhu`` plan the value is the mean of the landlord and
    farmer rates; otherwise it is wins over games. Draws count as losses.
    """
    if not results:
        raise EmptyResults("no match results to score")
    if plan == "doudizhu":
        rates = []
        for role in ("landlord", "farmer"):
            rs = [r["win"] for r in results if r["role"] == role]
            if not rs:
                raise EmptyResults(f"no {role} results")
            rates.append(sum(rs) / len(rs))
        return (rates[0] + rates[1]) / 2
    return sum(bool(r["win"]) for r in results) / len(results)


def play_match(game, policies_by_seat, seed: int, j: int, engine=None) -> dict:
    """One match; returns payoffs and, for Guandan, the per-deal winning teams."""
    g = game_id(game)
    engine = engine or get_engine(g)
    match_seed = derive_seed(seed, "eval", j)
    rngs = [make_rng(match_seed, "seat", i) for i in range(engine.num_players)]
    for pol in {id(p): p for p in policies_by_seat}.values():
        if hasattr(pol, "match_id"):
            pol.match_id = j
    state = engine.reset(match_seed, **reset_options(g, j))
    while not state.terminal:
        seat = state.seat
        legal = engine.legal_actions(state)
        action = policies_by_seat[seat].act(engine.observe(state), legal, rngs[seat])
        state = engine.step(state, action)
    out = {"payoffs": engine.payoffs(state)}
    if g is GameId.GUANDAN:
        out["deal_teams"] = [d["team"] for d in state.deal_results]
    return out


def evaluate(game, subject, opponent, n_games: int, seed: int = 0, workers: int = 1,
             engine_options: dict | None = None) -> MetricReport:
    """Play ``n_games`` matches of ``subject`` against ``opponent`` and score the subject."""
    if n_games <= 0:
        raise ValueError("n_games must be positive")
    g = game_id(game)
    subj = resolve_policy(subject, g)
    opp = resolve_policy(opponent, g)
    engine = get_engine(g, **(engine_options or {}))
    plan = role_plan(g, n_games)

    def run(j):
        seats = subject_seats(g, plan[j])
        by_seat = [subj if i in seats else opp for i in range(engine.num_players)]
        return play_match(g, by_seat, seed, j, engine)

    outcomes: dict[int, dict] = {}
    error = None
    try:
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                for j, out in zip(range(n_games), pool.map(run, range(n_games))):
                    outcomes[j] = out
        else:
            for j in range(n_games):
                outcomes[j] = run(j)
    except TransportError as exc:
        error = f"{type(exc).__name__}: {exc}"

    report = _score(g, plan, outcomes)
    for p in {id(subj): subj, id(opp): opp}.values():
        report.fallbacks += getattr(p, "fallbacks", 0)
        report.retries += getattr(p, "retries", 0)
    if error is not None:
        report.partial = True
        report.error = error
    return report


def _score(g: GameId, plan: list[str], outcomes: dict[int, dict]) -> MetricReport:
    kind = metric_kind(g)
    idx = sorted(outcomes)
    if kind == WIN_RATE:
        results = [{"role": plan[j], "win": outcomes[j]["payoffs"][0 if plan[j] == "landlord" else 1] > 0}
                   for j in idx]
        per_role = {}
        for role in ("landlord", "farmer"):
            rs = [r["win"] for r in results if r["role"] == role]
            per_role[role] = {"games": len(rs), "win_rate": sum(rs) / len(rs) if rs else None}
        value = compute_win_rate(results, "doudizhu") if all(v["games"] for v in per_role.values()) else math.nan
        return MetricReport(g.value, len(idx), kind, value, per_role)
    if kind == ROUND_WIN_RATE:
        deals = wins = 0
        for j in idx:
            team = int(plan[j][-1])
            for t in outcomes[j]["deal_teams"]:
                deals += 1
                wins += t == team
        value = wins / deals if deals else math.nan
        return MetricReport(g.value, len(idx), kind, value, {"deals": deals, "deals_won": wins})
    rewards = [outcomes[j]["payoffs"][int(plan[j][-1])] for j in idx]
    n = len(rewards)
    mean = sum(rewards) / n if n else math.nan
    se = None
    if n > 1:
        var = sum((r - mean) ** 2 for r in rewards) / (n - 1)
        se = math.sqrt(var / n)
    per_role = {}
    for s in (0, 1):
        rs = [r for r, j in zip(rewards, idx) if plan[j] == f"seat_{s}"]
        per_role[f"seat_{s}"] = {"games": len(rs), "mean_reward": sum(rs) / len(rs) if rs else None}
    return MetricReport(g.value, n, kind, mean, per_role, stderr=se)
