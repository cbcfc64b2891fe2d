"""Heads-up Leduc, Limit and No-limit Hold'em betting machines.

All three share one round/turn skeleton. ``bets`` holds each seat's total
commitment for the hand, so the pot is ``sum(bets)``. Payoffs are net chips
divided by ``normalizer`` (2 by default: the big blind, or two antes).
"""

from __future__ import annotations

import math
import random
from collections import Counter
from itertools import chain

from cardlab.cards import GameId, deck_notation
from cardlab.core import Engine, Observation, State, register
from cardlab.errors import NonTerminal
from cardlab.games.evaluator import RANK_VALUE, rank_cards

FOLD, CALL, RAISE, CHECK = "fold", "call", "raise", "check"
LIMIT_ACTIONS = (FOLD, CALL, RAISE, CHECK)

NL_FOLD = "FOLD"
NL_CHECK_CALL = "CHECK_CALL"
NL_HALF = "RAISE_HALF_POT"
NL_POT = "RAISE_POT"
NL_ALL_IN = "ALL_IN"
NL_ACTIONS = (NL_FOLD, NL_CHECK_CALL, NL_HALF, NL_POT, NL_ALL_IN)

HOLDEM_ROUNDS = ("pre-flop", "flop", "turn", "river")
_STREET_CARDS = (0, 3, 1, 1)


class PokerState(State):
    def __init__(self, game):
        self.game = game
        self._legal = None

    def copy(self):
        s = PokerState(self.game)
        s.__dict__.update(self.__dict__)
        s.holes = [list(h) for h in self.holes]
        s.board = list(self.board)
        s.deck = list(self.deck)
        s.bets = list(self.bets)
        s.raises = list(self.raises)
        if self.stacks is not None:
            s.stacks = list(self.stacks)
        s.history = list(self.history)
        s._legal = None
        return s

    @property
    def pot(self) -> int:
        return sum(self.bets)


class _Betting(Engine):
    num_players = 2
    roles = ("player_0", "player_1")
    max_steps = 30
    num_rounds: int
    hole_cards: int

    def __init__(self, normalizer: float = 2.0):
        self.normalizer = normalizer

    # hooks
    def _post(self, s: PokerState) -> None:
        raise NotImplementedError

    def _first_actor(self, s: PokerState) -> int:
        return 1 - s.dealer

    def _street(self, rnd: int) -> int:
        raise NotImplementedError

    def _strength(self, s: PokerState, seat: int):
        raise NotImplementedError

    def reset(self, seed: int, dealer: int | None = None, deal=None, **_) -> PokerState:
        """``deal`` fixes the cards: (holes per seat, board in dealing order)."""
        rng = random.Random(seed)
        s = PokerState(self.game)
        s.dealer = rng.randrange(2) if dealer is None else dealer
        deck = deck_notation(self.game)
        if deal is None:
            rng.shuffle(deck)
            holes = [[deck.pop() for _ in range(self.hole_cards)] for _ in range(2)]
        else:
            holes = [list(h) for h in deal[0]]
            board = list(deal[1])
            fixed = {c for h in holes for c in h} | set(board)
            deck = [c for c in deck if c not in fixed]
            rng.shuffle(deck)
            # cards are popped from the end, so the fixed board goes on top
            deck += list(reversed(board))
        s.holes = holes
        s.deck = deck
        s.board = []
        s.round = 0
        s.bets = [0, 0]
        s.stacks = None
        s.raises = [0] * self.num_rounds
        s.last_raise = 0
        s.acted = 0
        s.folded = None
        s.history = []
        s.terminal = False
        s.payoffs = None
        self._post(s)
        s.seat = self._first_actor(s)
        return s

    def _end_round(self, s: PokerState) -> None:
        while True:
            if s.round == self.num_rounds - 1:
                self._showdown(s)
                return
            s.round += 1
            for _ in range(self._street(s.round)):
                s.board.append(s.deck.pop())
            s.acted = 0
            s.last_raise = 0
            s.seat = 1 - s.dealer
            if s.stacks is None or min(s.stacks) > 0:
                return

    def _call_or_check(self, s: PokerState) -> None:
        seat = s.seat
        to_call = max(s.bets) - s.bets[seat]
        if to_call:
            pay = to_call if s.stacks is None else min(to_call, s.stacks[seat])
            s.bets[seat] += pay
            if s.stacks is not None:
                s.stacks[seat] -= pay
        s.acted += 1
        if s.acted >= 2 and s.bets[0] == s.bets[1]:
            self._end_round(s)
        else:
            s.seat = 1 - seat

    def _fold(self, s: PokerState) -> None:
        f = s.seat
        s.folded = f
        won = s.bets[f] / self.normalizer
        pay = [0.0, 0.0]
        pay[f], pay[1 - f] = -won, won
        s.payoffs = tuple(pay)
        s.terminal = True

    def _showdown(self, s: PokerState) -> None:
        a, b = self._strength(s, 0), self._strength(s, 1)
        won = s.bets[0] / self.normalizer
        if a > b:
            s.payoffs = (won, -won)
        elif b > a:
            s.payoffs = (-won, won)
        else:
            s.payoffs = (0.0, 0.0)
        s.terminal = True

    def winner(self, s: PokerState) -> int | None:
        """Seat that took the pot, or None on a split."""
        if not s.terminal:
            raise NonTerminal("hand still running")
        if s.payoffs[0] == s.payoffs[1]:
            return None
        return 0 if s.payoffs[0] > s.payoffs[1] else 1

    def card_zones(self, s) -> Counter:
        return Counter(chain(s.deck, s.board, *s.holes))

    def _history(self, s):
        return [[i, a] for i, a in s.history]

    def _legal_list(self, s, seat):
        return list(self.legal_actions(s)) if not s.terminal and seat == s.seat else []


class _FixedLimit(_Betting):
    cap: int
    raise_sizes: tuple[int, ...]

    def _legal(self, s: PokerState) -> list:
        owed = s.bets[s.seat] < max(s.bets)
        acts = [FOLD]
        if owed:
            acts.append(CALL)
        if s.raises[s.round] < self.cap:
            acts.append(RAISE)
        if not owed:
            acts.append(CHECK)
        return acts

    def _apply(self, s: PokerState, action: str) -> None:
        if action == FOLD:
            self._fold(s)
        elif action == RAISE:
            s.bets[s.seat] = max(s.bets) + self.raise_sizes[s.round]
            s.raises[s.round] += 1
            s.acted = 1
            s.seat = 1 - s.seat
        else:
            self._call_or_check(s)


@register
class Leduc(_FixedLimit):
    game = GameId.LEDUC
    num_rounds = 2
    hole_cards = 1
    cap = 2
    raise_sizes = (2, 4)
    ante = 1

    def reset(self, seed: int, dealer: int | None = None, deal=None, **kw) -> PokerState:
        """``deal`` may be a flat (card0, card1, board) triple."""
        if deal is not None and isinstance(deal[0], str):
            deal = ([[deal[0]], [deal[1]]], [deal[2]])
        return super().reset(seed, dealer=dealer, deal=deal, **kw)

    def _post(self, s):
        s.bets = [self.ante, self.ante]

    def _street(self, rnd):
        return 1

    def _strength(self, s, seat):
        card = s.holes[seat][0]
        pair = card[1] == s.board[0][1]
        return (pair, RANK_VALUE[card[1]])

    def observe(self, s: PokerState, seat: int | None = None) -> Observation:
        seat = s.seat if seat is None else seat
        fields = {
            "round": s.round + 1,
            "position": seat,
            "hand": s.holes[seat][0],
            "public_card": s.board[0] if s.board else None,
            "my_chips": s.bets[seat],
            "all_chips": list(s.bets),
            "raises": list(s.raises),
            "history": self._history(s),
            "legal_actions": self._legal_list(s, seat),
        }
        return Observation(self.game.value, seat, self.roles[seat], fields)


class _Holdem(_Betting):
    num_rounds = 4
    hole_cards = 2
    small_blind = 1
    big_blind = 2

    def _post(self, s):
        s.bets[s.dealer] = self.small_blind
        s.bets[1 - s.dealer] = self.big_blind

    def _first_actor(self, s):
        # the dealer posts the small blind and opens pre-flop
        return s.dealer

    def _street(self, rnd):
        return _STREET_CARDS[rnd]

    def _strength(self, s, seat):
        cards = s.holes[seat] + s.board
        return rank_cards([(RANK_VALUE[c[1]], c[0]) for c in cards])

    def _common_fields(self, s, seat):
        return {
            "round": HOLDEM_ROUNDS[s.round],
            "position": seat,
            "hole_cards": list(s.holes[seat]),
            "community_cards": list(s.board),
            "my_chips": s.bets[seat],
            "all_chips": list(s.bets),
        }


@register
class LimitHoldem(_Holdem, _FixedLimit):
    game = GameId.LIMIT
    cap = 4
    raise_sizes = (2, 2, 4, 4)

    def observe(self, s: PokerState, seat: int | None = None) -> Observation:
        seat = s.seat if seat is None else seat
        fields = self._common_fields(s, seat)
        fields["raises"] = list(s.raises)
        fields["history"] = self._history(s)
        fields["legal_actions"] = self._legal_list(s, seat)
        return Observation(self.game.value, seat, self.roles[seat], fields)


@register
class NoLimitHoldem(_Holdem):
    game = GameId.NOLIMIT
    stack = 100

    def _post(self, s):
        super()._post(s)
        s.stacks = [self.stack - b for b in s.bets]

    def raise_options(self, s: PokerState) -> dict[str, int]:
        """Chips each raise action moves from the actor's stack, after deduplication."""
        seat = s.seat
        stack = s.stacks[seat]
        to_call = max(s.bets) - s.bets[seat]
        if s.stacks[1 - seat] == 0 or to_call >= stack:
            return {}
        after_call = s.pot + to_call
        min_raise = max(s.last_raise, self.big_blind)
        out: dict[str, int] = {}
        for name, size in ((NL_HALF, math.ceil(after_call / 2)), (NL_POT, after_call)):
            amount = to_call + max(size, min_raise)
            if amount >= stack or amount in out.values():
                continue
            out[name] = amount
        out[NL_ALL_IN] = stack
        return out

    def _legal(self, s: PokerState) -> list:
        return [NL_FOLD, NL_CHECK_CALL] + list(self.raise_options(s))

    def _apply(self, s: PokerState, action: str) -> None:
        if action == NL_FOLD:
            self._fold(s)
            return
        if action == NL_CHECK_CALL:
            self._call_or_check(s)
            return
        seat = s.seat
        amount = self.raise_options(s)[action]
        to_call = max(s.bets) - s.bets[seat]
        s.bets[seat] += amount
        s.stacks[seat] -= amount
        s.last_raise = max(s.last_raise, amount - to_call)
        s.raises[s.round] += 1
        s.acted = 1
        s.seat = 1 - seat

    def observe(self, s: PokerState, seat: int | None = None) -> Observation:
        seat = s.seat if seat is None else seat
        fields = self._common_fields(s, seat)
        fields["pot"] = s.pot
        fields["stacks"] = list(s.stacks)
        fields["history"] = self._history(s)
        fields["legal_actions"] = self._legal_list(s, seat)
        return Observation(self.game.value, seat, self.roles[seat], fields)
