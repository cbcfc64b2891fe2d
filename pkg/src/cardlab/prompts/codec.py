"""The ``{"action": ...}`` JSON wire format, one schema per game.

Engine actions and their JSON values differ only for the two climbing
games: DouDizhu moves are int tuples (lists on the wire) and Guandan moves
are ``GuanCombo`` triples. Every other game uses its action strings as-is.
"""

from __future__ import annotations

import json
import re

from cardlab.cards import UNO_COLORS, UNO_FACES, GameId, game_id
from cardlab.errors import ParseError, SchemaMismatch, UnknownAction
from cardlab.games.guandan import PASS_T, TYPES, GuanCombo
from cardlab.games.poker import LIMIT_ACTIONS, NL_ACTIONS

_DOU_VALUES = set(range(3, 15)) | {17, 20, 30}
_GUAN_RANKS = set("A23456789TJQKBR") | {PASS_T}
_GUAN_CARD = re.compile(r"^[SHCD][A2-9TJQKBR]$")
_UNO = re.compile(rf"^(draw|[{UNO_COLORS}]-({'|'.join(UNO_FACES)}))$")
_GIN_CARD = r"[A2-9TJQK][SHCD]"
_GIN = re.compile(rf"^(draw_card|pick_up_discard|gin|declare_dead|score N|score S|(discard|knock) {_GIN_CARD})$")
_MAHJONG = re.compile(
    r"^(dahai: [0-9][mps]r?|dahai: [ESWNPFC]|reach|chi_low|chi_mid|chi_high|pon|kan|hora|ryukyoku|pass)$"
)
_STRING_GAMES = {
    GameId.UNO: _UNO.match,
    GameId.GIN_RUMMY: _GIN.match,
    GameId.LEDUC: set(LIMIT_ACTIONS).__contains__,
    GameId.LIMIT: set(LIMIT_ACTIONS).__contains__,
    GameId.NOLIMIT: set(NL_ACTIONS).__contains__,
    GameId.MAHJONG: _MAHJONG.match,
}


def action_value(game, action):
    """JSON-ready value for an engine action."""
    g = game_id(game)
    if g is GameId.DOUDIZHU:
        return [int(c) for c in action]
    if g is GameId.GUANDAN:
        return action.to_json() if isinstance(action, GuanCombo) else GuanCombo.from_json(action).to_json()
    return action


def action_from_value(game, value):
    """Engine action for a JSON value, validated against the game's action schema."""
    g = game_id(game)
    if g is GameId.DOUDIZHU:
        if not isinstance(value, list) or not all(type(c) is int for c in value):
            raise SchemaMismatch(f"doudizhu action must be a list of integers, got {value!r}")
        if any(c not in _DOU_VALUES for c in value):
            raise UnknownAction(f"doudizhu action has unknown card values: {value!r}")
        return tuple(value)
    if g is GameId.GUANDAN:
        if (
            not isinstance(value, list)
            or len(value) != 3
            or not isinstance(value[0], str)
            or not isinstance(value[1], str)
            or not (isinstance(value[2], list) or value[2] == PASS_T)
        ):
            raise SchemaMismatch(f"guandan action must be [Type, Rank, Cards], got {value!r}")
        t, r, cards = value
        if t not in TYPES or r not in _GUAN_RANKS:
            raise UnknownAction(f"unknown guandan type or rank in {value!r}")
        if t == PASS_T:
            if r != PASS_T or cards != PASS_T:
                raise UnknownAction(f"malformed guandan pass {value!r}")
            return GuanCombo.from_json(value)
        if not cards or not all(isinstance(c, str) and _GUAN_CARD.match(c) for c in cards):
            raise UnknownAction(f"unknown guandan cards in {value!r}")
        return GuanCombo.from_json(value)
    if g in _STRING_GAMES:
        if not isinstance(value, str):
            raise SchemaMismatch(f"{g.value} action must be a string, got {value!r}")
        if not _STRING_GAMES[g](value):
            raise UnknownAction(f"unknown {g.value} action {value!r}")
        return value
    raise SchemaMismatch(f"no action codec for {g.value}")


def encode_action(game, action) -> str:
    return json.dumps({"action": action_value(game, action)})


def decode_action(game, text: str):
    """Parse ``{"action": ...}`` text back into an engine action."""
    try:
        doc = json.loads(text)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"reply is not JSON: {exc}") from None
    if not isinstance(doc, dict) or "action" not in doc:
        raise SchemaMismatch(f"reply lacks an 'action' key: {text!r}")
    return action_from_value(game, doc["action"])
