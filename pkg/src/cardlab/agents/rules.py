"""Deterministic rule heuristics, one per game.

These are documented baselines that fill the teacher and opponent slots.
They read only the observation fields and the legal list, and ignore the rng.
"""

from __future__ import annotations

from collections import Counter

from cardlab.agents.base import Policy
from cardlab.cards import UNO_COLORS, GameId, game_id
from cardlab.core import Observation
from cardlab.errors import UnsupportedGame
from cardlab.games import gin_rummy as gin
from cardlab.games.doudizhu import classify
from cardlab.games.evaluator import RANK_VALUE, Category, rank_cards
from cardlab.games.guandan import BACK, BOOM, NATURAL, PASS, PASS_T, TRIBUTE, LevelContext, bomb_key, normal_key


def _fields(obs):
    return obs.fields if isinstance(obs, Observation) else obs


# DouDizhu ------------------------------------------------------------------------


def _dou_last_mover(history) -> str | None:
    for role, cards in reversed(history):
        if cards:
            return role
    return None


def dou_rule(obs, legal):
    f = _fields(obs)
    moves = [m for m in legal if m]
    if () not in legal:
        non_bombs = [m for m in moves if not classify(m).is_bomb]
        pool = non_bombs or moves
        # shed as many cards as possible, from the low end
        return max(pool, key=lambda m: (len(m), -classify(m).primal, tuple(-c for c in m)))
    if not moves:
        return ()
    last_role = _dou_last_mover(f["history"])
    me = f["role"]
    if last_role is not None and me != "landlord" and last_role != "landlord":
        return ()
    non_bombs = [m for m in moves if not classify(m).is_bomb]
    if non_bombs:
        return min(non_bombs, key=lambda m: (classify(m).primal, len(m), m))
    return min(moves, key=lambda m: (classify(m).category == "Rocket", classify(m).primal, m))


# Guandan -------------------------------------------------------------------------


def guan_rule(obs, legal):
    f = _fields(obs)
    if legal[0].type in (TRIBUTE, BACK):
        return legal[0]
    ctx = LevelContext(NATURAL[f["current_rank"]])
    plays = [m for m in legal if m.type != PASS_T]
    if PASS not in legal:
        non_bombs = [m for m in plays if m.type != BOOM] or plays
        return max(non_bombs, key=lambda m: (len(m.cards), -_guan_strength(m, ctx), m.cards))
    if not plays:
        return PASS
    last, mate = f["last_action"], f["teammate_last_action"]
    if last[0] != PASS_T and last == mate:
        return PASS
    non_bombs = [m for m in plays if m.type != BOOM]
    if non_bombs:
        return min(non_bombs, key=lambda m: (_guan_strength(m, ctx), len(m.cards), m.cards))
    return min(plays, key=lambda m: (bomb_key(m, ctx), m.cards))


def _guan_strength(m, ctx):
    if m.type == BOOM:
        return 100 + bomb_key(m, ctx)[0]
    return normal_key(m, ctx)


# Uno -----------------------------------------------------------------------------

# action cards outrank every number
_FACE_RANK = {"draw_2": 22, "skip": 21, "reverse": 20}


def _uno_face_rank(face: str) -> int:
    return _FACE_RANK.get(face) or int(face)


def uno_rule(obs, legal):
    f = _fields(obs)
    if legal == ["draw"]:
        return "draw"
    active = f["top_card"].split("-", 1)[0]
    plain = [a for a in legal if not a.endswith("wild") and not a.endswith("wild_draw_4")]
    same_color = [a for a in plain if a.startswith(active + "-")]
    if same_color:
        return max(same_color, key=lambda a: (_uno_face_rank(a.split("-", 1)[1]), a))
    if plain:
        return max(plain, key=lambda a: (_uno_face_rank(a.split("-", 1)[1]), a))
    colors = Counter(c.split("-", 1)[0] for c in f["hand"] if "wild" not in c)
    best = max(UNO_COLORS, key=lambda c: (colors[c], -UNO_COLORS.index(c)))
    for face in ("wild_draw_4", "wild"):
        if f"{best}-{face}" in legal:
            return f"{best}-{face}"
    return legal[0]


# Gin Rummy -----------------------------------------------------------------------


def gin_rule(obs, legal):
    f = _fields(obs)
    if len(legal) == 1:
        return legal[0]
    if gin.GIN in legal:
        return gin.GIN
    if gin.DRAW_CARD in legal:
        # always take the unknown stock card; never reveal intent by picking up
        return gin.DRAW_CARD
    hand = f["hand"]
    dws = gin.discard_deadwoods(hand)
    knocks = [a for a in legal if a.startswith("knock ")]
    if knocks:
        return min(knocks, key=lambda a: (dws[a[6:]], -gin.card_value(a[6:]), a))
    discards = [a for a in legal if a.startswith("discard ")]
    return min(discards, key=lambda a: (dws[a[8:]], -gin.card_value(a[8:]), a))


# Poker ---------------------------------------------------------------------------


def _facing_bet(f) -> bool:
    return f["my_chips"] < max(f["all_chips"])


def _passive(legal, facing):
    for a in ("check", "CHECK_CALL") if not facing else ():
        if a in legal:
            return a
    return "FOLD" if "FOLD" in legal else "fold"


def _aggressive(legal):
    for a in ("raise", "RAISE_HALF_POT", "RAISE_POT", "ALL_IN", "call", "check", "CHECK_CALL"):
        if a in legal:
            return a
    return legal[0]


def _calling(legal):
    for a in ("call", "check", "CHECK_CALL"):
        if a in legal:
            return a
    return legal[0]


def leduc_rule(obs, legal):
    f = _fields(obs)
    card = f["hand"][1]
    board = f["public_card"]
    if (board and board[1] == card) or (board is None and card == "K"):
        return _aggressive(legal)
    if card == "Q" or (board is not None and card == "K"):
        return _calling(legal)
    return _passive(legal, _facing_bet(f))


def holdem_rule(obs, legal):
    f = _fields(obs)
    hole = f["hole_cards"]
    board = f["community_cards"]
    ranks = sorted((RANK_VALUE[c[1]] for c in hole), reverse=True)
    if not board:
        if ranks[0] == ranks[1] or ranks[1] >= 11:
            return _aggressive(legal)
        if ranks[0] == 14 or (hole[0][0] == hole[1][0] and ranks[0] - ranks[1] == 1) or ranks[1] >= 9:
            return _calling(legal)
        return _passive(legal, _facing_bet(f))
    cat = rank_cards([(RANK_VALUE[c[1]], c[0]) for c in hole + board]).category
    if cat >= Category.TWO_PAIR:
        return _aggressive(legal)
    if cat == Category.ONE_PAIR:
        return _calling(legal)
    return _passive(legal, _facing_bet(f))


_RULES = {
    GameId.DOUDIZHU: dou_rule,
    GameId.GUANDAN: guan_rule,
    GameId.UNO: uno_rule,
    GameId.GIN_RUMMY: gin_rule,
    GameId.LEDUC: leduc_rule,
    GameId.LIMIT: holdem_rule,
    GameId.NOLIMIT: holdem_rule,
}


def rule_policy(game, obs, legal):
    g = game_id(game)
    if g not in _RULES:
        raise UnsupportedGame(f"no rule policy for {g.value}")
    return _RULES[g](obs, legal)


class RulePolicy(Policy):
    name = "rule"

    def __init__(self, game):
        g = game_id(game)
        if g not in _RULES:
            raise UnsupportedGame(f"no rule policy for {g.value}")
        self.game = g
        self._fn = _RULES[g]

    def act(self, obs, legal, rng=None):
        if len(legal) == 1:
            return legal[0]
        return self._fn(obs, legal)
