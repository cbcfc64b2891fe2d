"""Fixed-width numeric encodings of poker observations, plus action index maps."""

from __future__ import annotations

import numpy as np

from cardlab.cards import GameId, french_deck, game_id
from cardlab.core import Observation
from cardlab.errors import UnsupportedGame
from cardlab.games.poker import HOLDEM_ROUNDS, LIMIT_ACTIONS, NL_ACTIONS

_CARD_INDEX = {c: i for i, c in enumerate(french_deck())}
_LEDUC_RANKS = "JQK"
# upper bounds on one seat's commitment, used for scaling
_LEDUC_MAX_BET = 13.0
_LIMIT_MAX_BET = 50.0
_NL_STACK = 100.0

FEATURE_WIDTH = {GameId.LEDUC: 11, GameId.LIMIT: 110, GameId.NOLIMIT: 112}
ACTIONS = {GameId.LEDUC: LIMIT_ACTIONS, GameId.LIMIT: LIMIT_ACTIONS, GameId.NOLIMIT: NL_ACTIONS}


def action_space(game) -> tuple[str, ...]:
    g = game_id(game)
    if g not in ACTIONS:
        raise UnsupportedGame(f"no fixed action encoding for {g.value}")
    return ACTIONS[g]


def legal_mask(game, legal) -> np.ndarray:
    space = action_space(game)
    mask = np.zeros(len(space), dtype=bool)
    for a in legal:
        mask[space.index(a)] = True
    return mask


def encode_features(game, obs) -> np.ndarray:
    g = game_id(game)
    f = obs.fields if isinstance(obs, Observation) else obs
    if g is GameId.LEDUC:
        x = np.zeros(11)
        x[_LEDUC_RANKS.index(f["hand"][1])] = 1.0
        board = f["public_card"]
        x[3 + (_LEDUC_RANKS.index(board[1]) if board else 3)] = 1.0
        x[7] = f["round"] - 1
        me = f["position"]
        x[8] = f["all_chips"][me] / _LEDUC_MAX_BET
        x[9] = f["all_chips"][1 - me] / _LEDUC_MAX_BET
        x[10] = f["raises"][f["round"] - 1] / 2.0
        return x
    if g in (GameId.LIMIT, GameId.NOLIMIT):
        x = np.zeros(FEATURE_WIDTH[g])
        for c in f["hole_cards"]:
            x[_CARD_INDEX[c]] = 1.0
        for c in f["community_cards"]:
            x[52 + _CARD_INDEX[c]] = 1.0
        x[104 + HOLDEM_ROUNDS.index(f["round"])] = 1.0
        me = f["position"]
        scale = _LIMIT_MAX_BET if g is GameId.LIMIT else _NL_STACK
        x[108] = f["all_chips"][me] / scale
        x[109] = f["all_chips"][1 - me] / scale
        if g is GameId.NOLIMIT:
            x[110] = f["stacks"][me] / _NL_STACK
            x[111] = f["stacks"][1 - me] / _NL_STACK
        return x
    raise UnsupportedGame(f"no feature encoding for {g.value}")
