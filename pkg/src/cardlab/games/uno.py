"""Two-player Uno.

Actions are card notations (``r-7``, ``g-skip``), wild plays carrying the
declared color (``b-wild``, ``y-wild_draw_4``), or ``draw``. In two-player
play Skip, Reverse, Draw Two and Wild Draw Four all give the acting player
another turn. Wild Draw Four may be played at any time.

A drawn card that can be played is played at once as part of ``draw``; a
drawn wild takes a color from the match's seeded stream. The play is
mandatory, so it is never a separate decision.
"""

from __future__ import annotations

import random
from collections import Counter
from itertools import chain

from cardlab.cards import UNO_COLORS, GameId, uno_deck
from cardlab.core import Engine, Observation, State, derive_seed, register

DRAW = "draw"
_REPEAT_TURN = ("skip", "reverse", "draw_2", "wild_draw_4")


def split(card: str) -> tuple[str, str]:
    color, _, face = card.partition("-")
    return color, face


def is_wild(card: str) -> bool:
    return split(card)[1] in ("wild", "wild_draw_4")


def playable(card: str, target: str) -> bool:
    color, face = split(card)
    if face in ("wild", "wild_draw_4"):
        return True
    t_color, t_face = split(target)
    return color == t_color or face == t_face


def play_actions(card: str) -> list[str]:
    color, face = split(card)
    if face in ("wild", "wild_draw_4"):
        return [f"{c}-{face}" for c in UNO_COLORS]
    return [card]


def uno_legal(hand, target: str) -> list[str]:
    acts = []
    seen = set()
    for card in sorted(hand):
        if playable(card, target):
            for a in play_actions(card):
                if a not in seen:
                    seen.add(a)
                    acts.append(a)
    return acts or [DRAW]


class UnoState(State):
    def __init__(self):
        self.game = GameId.UNO
        self._legal = None

    def copy(self):
        s = UnoState()
        s.__dict__.update(self.__dict__)
        s.hands = [list(h) for h in self.hands]
        s.draw_pile = list(self.draw_pile)
        s.discard = list(self.discard)
        s.history = list(self.history)
        s._legal = None
        return s


@register
class Uno(Engine):
    game = GameId.UNO
    num_players = 2
    roles = ("player_0", "player_1")
    max_steps = 2000

    def reset(self, seed: int, first_player: int | None = None, **_) -> UnoState:
        rng = random.Random(seed)
        deck = uno_deck()
        rng.shuffle(deck)
        s = UnoState()
        s.seed = seed
        s.reshuffles = 0
        s.hands = [sorted(deck[:7]), sorted(deck[7:14])]
        pile = deck[14:]
        # the game starts on a non-wild card; wilds go back into the pile
        while is_wild(pile[-1]):
            card = pile.pop()
            pile.insert(rng.randrange(len(pile)), card)
        s.discard = [pile.pop()]
        s.draw_pile = pile
        s.target = s.discard[-1]
        s.direction = 1
        s.seat = rng.randrange(2) if first_player is None else first_player
        s.history = []
        s.terminal = False
        s.payoffs = None
        return s

    def _legal(self, s: UnoState) -> list:
        return uno_legal(s.hands[s.seat], s.target)

    def _draw(self, s: UnoState, n: int, seat: int) -> list[str]:
        got = []
        for _ in range(n):
            if not s.draw_pile:
                if len(s.discard) <= 1:
                    break
                # reshuffle everything under the top card into a new draw pile
                s.reshuffles += 1
                rest = s.discard[:-1]
                s.discard = s.discard[-1:]
                random.Random(derive_seed(s.seed, "reshuffle", s.reshuffles)).shuffle(rest)
                s.draw_pile = rest
            card = s.draw_pile.pop()
            s.hands[seat].append(card)
            got.append(card)
        s.hands[seat].sort()
        return got

    def _apply(self, s: UnoState, action: str) -> None:
        seat = s.seat
        other = 1 - seat
        if action == DRAW:
            got = self._draw(s, 1, seat)
            if not got:
                # nothing left anywhere to draw: the hand is a draw
                s.terminal = True
                s.payoffs = (0.0, 0.0)
                return
            card = got[0]
            if not playable(card, s.target):
                s.seat = other
                return
            if is_wild(card):
                rng = random.Random(derive_seed(s.seed, "color", len(s.history)))
                action = f"{UNO_COLORS[rng.randrange(4)]}-{split(card)[1]}"
            else:
                action = card
            self._play(s, seat, card, action)
            return
        face = split(action)[1]
        if face in ("wild", "wild_draw_4"):
            card = next(c for c in s.hands[seat] if split(c)[1] == face)
        else:
            card = action
        self._play(s, seat, card, action)

    def _play(self, s: UnoState, seat: int, card: str, action: str) -> None:
        other = 1 - seat
        face = split(action)[1]
        hand = s.hands[seat]
        hand.remove(card)
        s.discard.append(card)
        s.target = action
        if not hand:
            s.terminal = True
            s.payoffs = (1.0, -1.0) if seat == 0 else (-1.0, 1.0)
            return
        if face == "reverse":
            s.direction = -s.direction
        if face == "draw_2":
            self._draw(s, 2, other)
        elif face == "wild_draw_4":
            self._draw(s, 4, other)
        if face not in _REPEAT_TURN:
            s.seat = other

    def card_zones(self, s) -> Counter:
        return Counter(chain(s.draw_pile, s.discard, *s.hands))

    def observe(self, s: UnoState, seat: int | None = None) -> Observation:
        seat = s.seat if seat is None else seat
        fields = {
            "step": len(s.history),
            "position": seat,
            "hand": list(s.hands[seat]),
            "top_card": s.target,
            "played_cards": list(s.discard),
            "num_cards_left": [len(h) for h in s.hands],
            "history": [[i, a] for i, a in s.history],
            "legal_actions": list(self.legal_actions(s)) if not s.terminal and seat == s.seat else [],
        }
        return Observation(self.game.value, seat, self.roles[seat], fields)
