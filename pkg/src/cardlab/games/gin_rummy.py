"""Two-player Gin Rummy with an exact minimum-deadwood meld optimizer.

Cards are written rank-first (``3S``, ``TD``, ``AH``) to match the action
strings ``discard 3S`` and ``knock 3S``. Aces are low.
"""

from __future__ import annotations

import random
from collections import Counter
from itertools import chain, combinations
from functools import lru_cache
from typing import NamedTuple

from cardlab.cards import RANKS, SUITS, GameId, from_gin_notation
from cardlab.core import Engine, Observation, State, register
from cardlab.errors import BadHandSize

UNDERCUT_BONUS = 25
GIN_BONUS = 25
KNOCK_LIMIT = 10
DEAD_STOCK = 2

DRAW_CARD = "draw_card"
PICK_UP = "pick_up_discard"
GIN = "gin"
DECLARE_DEAD = "declare_dead"
SCORE_N = "score N"
SCORE_S = "score S"


_RANK_OF = {r: i + 1 for i, r in enumerate(RANKS)}
_SUIT_OF = {s: i for i, s in enumerate(SUITS)}


def rank_of(card: str) -> int:
    return _RANK_OF[card[0]]


def card_value(card: str) -> int:
    return min(_RANK_OF[card[0]], 10)


def gin_deck() -> list[str]:
    return [r + s for s in SUITS for r in RANKS]


_TO_DECK = {c: from_gin_notation(c) for c in gin_deck()}


def sort_hand(cards) -> list[str]:
    return sorted(cards, key=lambda c: (_SUIT_OF[c[1]], _RANK_OF[c[0]]))


class Meld(NamedTuple):
    kind: str  # "set" or "run"
    cards: tuple[str, ...]


class DeadwoodResult(NamedTuple):
    melds: tuple[Meld, ...]
    deadwood: tuple[str, ...]
    count: int


def all_melds(hand) -> list[Meld]:
    """Every candidate set and run contained in ``hand``."""
    out = []
    by_rank: dict[int, list[str]] = {}
    by_suit: dict[str, list[str]] = {}
    for c in hand:
        by_rank.setdefault(rank_of(c), []).append(c)
        by_suit.setdefault(c[1], []).append(c)
    for r in sorted(by_rank):
        cards = sorted(by_rank[r], key=lambda c: _SUIT_OF[c[1]])
        if len(cards) >= 3:
            out.extend(Meld("set", combo) for combo in combinations(cards, 3))
        if len(cards) == 4:
            out.append(Meld("set", tuple(cards)))
    for s in SUITS:
        cards = sorted(by_suit.get(s, ()), key=rank_of)
        for i in range(len(cards)):
            j = i
            while j + 1 < len(cards) and rank_of(cards[j + 1]) == rank_of(cards[j]) + 1:
                j += 1
                if j - i >= 2:
                    out.append(Meld("run", tuple(cards[i:j + 1])))
    return out


def _meld_combos(hand: tuple[str, ...]):
    """All pairwise-disjoint meld selections as (mask, melded value, melds)."""
    index = {c: i for i, c in enumerate(hand)}
    melds = all_melds(hand)
    masks = []
    values = []
    for m in melds:
        mask = 0
        for c in m.cards:
            mask |= 1 << index[c]
        masks.append(mask)
        values.append(sum(card_value(c) for c in m.cards))
    out = []

    def rec(start, used, val, chosen):
        out.append((used, val, chosen))
        for i in range(start, len(melds)):
            if not masks[i] & used:
                rec(i + 1, used | masks[i], val + values[i], chosen + (melds[i],))

    rec(0, 0, 0, ())
    return out


@lru_cache(maxsize=65536)
def _best(hand: tuple[str, ...]) -> DeadwoodResult:
    total = sum(card_value(c) for c in hand)
    best = max(_meld_combos(hand), key=lambda t: t[1])
    used = {c for m in best[2] for c in m.cards}
    dead = tuple(c for c in hand if c not in used)
    return DeadwoodResult(best[2], dead, total - best[1])


def best_melds(hand) -> DeadwoodResult:
    """Minimum-deadwood meld selection for a hand of any size."""
    return _best(tuple(sort_hand(hand)))


def min_deadwood(hand) -> DeadwoodResult:
    if len(hand) not in (10, 11):
        raise BadHandSize(f"gin hand must hold 10 or 11 cards, got {len(hand)}")
    return best_melds(hand)


@lru_cache(maxsize=65536)
def _discard_deadwoods(hand: tuple[str, ...]) -> tuple[int, ...]:
    total = sum(card_value(c) for c in hand)
    best = [0] * len(hand)
    for mask, val, _ in _meld_combos(hand):
        for i in range(len(hand)):
            if not mask >> i & 1 and val > best[i]:
                best[i] = val
    return tuple(total - card_value(c) - b for c, b in zip(hand, best))


def discard_deadwoods(hand) -> dict[str, int]:
    """Deadwood left after discarding each card of an 11-card hand."""
    key = tuple(sort_hand(hand))
    return dict(zip(key, _discard_deadwoods(key)))


def _layoff_closure(cards: list[str], melds) -> list[str]:
    sets = {rank_of(m.cards[0]) for m in melds if m.kind == "set" and len(m.cards) == 3}
    runs = [[m.cards[0][1], rank_of(m.cards[0]), rank_of(m.cards[-1])] for m in melds if m.kind == "run"]
    left = list(cards)
    changed = True
    while changed:
        changed = False
        for c in list(left):
            r, s = rank_of(c), c[1]
            placed = False
            for run in runs:
                if run[0] == s and r == run[1] - 1:
                    run[1] = r
                    placed = True
                elif run[0] == s and r == run[2] + 1:
                    run[2] = r
                    placed = True
                if placed:
                    break
            if not placed and r in sets:
                sets.discard(r)
                placed = True
            if placed:
                left.remove(c)
                changed = True
    return left


def defender_deadwood(hand, knocker_melds) -> int:
    """Defender's deadwood after forming melds and laying off onto the knocker's melds."""
    key = tuple(sort_hand(hand))
    best = None
    for mask, _, _ in _meld_combos(key):
        rest = [c for i, c in enumerate(key) if not mask >> i & 1]
        dw = sum(card_value(c) for c in _layoff_closure(rest, knocker_melds))
        if best is None or dw < best:
            best = dw
    return best


def gin_score(knocker_deadwood: int, defender_deadwood: int, gin: bool = False) -> tuple[int, int]:
    """Points for (knocker, defender)."""
    if gin:
        return defender_deadwood + GIN_BONUS, 0
    diff = defender_deadwood - knocker_deadwood
    if diff > 0:
        return diff, 0
    return 0, -diff + UNDERCUT_BONUS


class GinState(State):
    def __init__(self):
        self.game = GameId.GIN_RUMMY
        self._legal = None

    def copy(self):
        s = GinState()
        s.__dict__.update(self.__dict__)
        s.hands = [list(h) for h in self.hands]
        s.stock = list(self.stock)
        s.discard = list(self.discard)
        s.known = [list(k) for k in self.known]
        s.history = list(self.history)
        s._legal = None
        return s


@register
class GinRummy(Engine):
    game = GameId.GIN_RUMMY
    num_players = 2
    roles = ("player_0", "player_1")
    max_steps = 120

    def __init__(self, max_moves: int = 116):
        # a hand still running after max_moves decisions can only be declared dead
        self.max_moves = max_moves

    def reset(self, seed: int, dealer: int | None = None, **_) -> GinState:
        rng = random.Random(seed)
        deck = gin_deck()
        rng.shuffle(deck)
        s = GinState()
        s.dealer = rng.randrange(2) if dealer is None else dealer
        first = 1 - s.dealer
        hands = [None, None]
        hands[first] = sort_hand(deck[:11])
        hands[s.dealer] = sort_hand(deck[11:21])
        s.hands = hands
        s.stock = deck[21:]
        s.discard = []
        s.known = [[], []]
        s.picked = None
        s.phase = "discard"
        s.seat = first
        s.outcome = None
        s.history = []
        s.terminal = False
        s.payoffs = None
        return s

    def _legal(self, s: GinState) -> list:
        if s.phase == "draw":
            if len(s.stock) <= DEAD_STOCK or len(s.history) >= self.max_moves:
                return [DECLARE_DEAD]
            acts = [DRAW_CARD]
            if s.discard:
                acts.append(PICK_UP)
            return acts
        if s.phase == "score_n":
            return [SCORE_N]
        if s.phase == "score_s":
            return [SCORE_S]
        dws = discard_deadwoods(s.hands[s.seat])
        options = [c for c in s.hands[s.seat] if c != s.picked]
        acts = [f"discard {c}" for c in options]
        acts += [f"knock {c}" for c in options if dws[c] <= KNOCK_LIMIT]
        if any(dws[c] == 0 for c in options):
            acts.append(GIN)
        return acts

    def _apply(self, s: GinState, action: str) -> None:
        seat = s.seat
        if action == DRAW_CARD:
            s.hands[seat] = sort_hand(s.hands[seat] + [s.stock.pop()])
            s.phase = "discard"
        elif action == PICK_UP:
            card = s.discard.pop()
            s.hands[seat] = sort_hand(s.hands[seat] + [card])
            s.known[seat].append(card)
            s.picked = card
            s.phase = "discard"
        elif action.startswith("discard "):
            self._discard(s, action[8:])
            s.seat = 1 - seat
            s.phase = "draw"
        elif action.startswith("knock "):
            self._discard(s, action[6:])
            self._finish(s, seat, gin=False)
        elif action == GIN:
            dws = discard_deadwoods(s.hands[seat])
            zero = [c for c in s.hands[seat] if c != s.picked and dws[c] == 0]
            # throw the highest-valued card that still leaves a fully melded hand
            self._discard(s, max(zero, key=lambda c: (card_value(c), rank_of(c))))
            self._finish(s, seat, gin=True)
        elif action == DECLARE_DEAD:
            s.outcome = {"kind": "dead", "points": [0, 0]}
            s.phase = "score_n"
            s.seat = 0
        elif action == SCORE_N:
            s.phase = "score_s"
            s.seat = 1
        elif action == SCORE_S:
            pts = s.outcome["points"]
            s.payoffs = tuple(max(-1.0, min(1.0, (pts[i] - pts[1 - i]) / 100)) for i in range(2))
            s.terminal = True

    def _discard(self, s: GinState, card: str) -> None:
        s.hands[s.seat].remove(card)
        if card in s.known[s.seat]:
            s.known[s.seat].remove(card)
        s.discard.append(card)
        s.picked = None

    def _finish(self, s: GinState, knocker: int, gin: bool) -> None:
        defender = 1 - knocker
        k = best_melds(s.hands[knocker])
        if gin:
            d = best_melds(s.hands[defender]).count
        else:
            d = defender_deadwood(s.hands[defender], k.melds)
        kp, dp = gin_score(k.count, d, gin)
        pts = [0, 0]
        pts[knocker], pts[defender] = kp, dp
        s.outcome = {
            "kind": "gin" if gin else "knock",
            "knocker": knocker,
            "knocker_deadwood": k.count,
            "defender_deadwood": d,
            "points": pts,
        }
        s.phase = "score_n"
        s.seat = 0

    def card_zones(self, s) -> Counter:
        return Counter(map(_TO_DECK.__getitem__, chain(s.stock, s.discard, *s.hands)))

    def observe(self, s: GinState, seat: int | None = None) -> Observation:
        seat = s.seat if seat is None else seat
        fields = {
            "step": len(s.history),
            "id": seat,
            "hand": list(s.hands[seat]),
            "top_discard": s.discard[-1] if s.discard else None,
            "other_discards": list(s.discard[:-1]),
            "opponent_known": list(s.known[1 - seat]),
            "stock_count": len(s.stock),
            "history": [[i, a] for i, a in s.history],
            "legal_actions": list(self.legal_actions(s)) if not s.terminal and seat == s.seat else [],
        }
        return Observation(self.game.value, seat, self.roles[seat], fields)
