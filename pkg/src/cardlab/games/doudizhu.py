"""DouDizhu: combo taxonomy, move enumeration, comparison and round flow.

Cards are the integers 3..14 (3..A), 17 (2), 20 (black joker), 30 (red joker).
A move is a sorted tuple of those integers; the empty tuple is a pass.
Seat 0 is always the landlord and receives the three extra cards; there is
no bidding phase.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import chain, combinations

from cardlab.cards import GameId, dou_deck_ints, DOU_INT_TO_RANK
from cardlab.core import Engine, Observation, State, register

PASS: tuple = ()
CHAIN_RANKS = tuple(range(3, 15))
BLACK_JOKER, RED_JOKER = 20, 30
ROLES = ("landlord", "landlord_down", "landlord_up")

SOLO = "Solo"
SOLO_CHAIN = "SoloChain"
PAIR = "Pair"
PAIR_CHAIN = "PairChain"
TRIO = "Trio"
TRIO_CHAIN = "TrioChain"
TRIO_SOLO = "TrioWithSolo"
TRIO_CHAIN_SOLO = "TrioChainWithSolo"
TRIO_PAIR = "TrioWithPair"
TRIO_CHAIN_PAIR = "TrioChainWithPair"
BOMB = "Bomb"
ROCKET = "Rocket"
FOUR_TWO_SOLO = "FourWithDualSolo"
FOUR_TWO_PAIR = "FourWithDualPair"

CATEGORIES = (
    SOLO, SOLO_CHAIN, PAIR, PAIR_CHAIN, TRIO, TRIO_CHAIN, TRIO_SOLO, TRIO_CHAIN_SOLO,
    TRIO_PAIR, TRIO_CHAIN_PAIR, BOMB, ROCKET, FOUR_TWO_SOLO, FOUR_TWO_PAIR,
)


@dataclass(frozen=True)
class DouCombo:
    category: str
    primal: int
    length: int  # chain length in ranks; 1 for non-chains
    cards: tuple

    @property
    def kickers(self) -> tuple:
        if self.category in (TRIO_SOLO, TRIO_PAIR, TRIO_CHAIN_SOLO, TRIO_CHAIN_PAIR):
            body = Counter({r: 3 for r in range(self.primal - self.length + 1, self.primal + 1)})
        elif self.category in (FOUR_TWO_SOLO, FOUR_TWO_PAIR):
            body = Counter({self.primal: 4})
        else:
            return ()
        return tuple(sorted((Counter(self.cards) - body).elements()))

    @property
    def is_bomb(self) -> bool:
        return self.category in (BOMB, ROCKET)


def _consecutive(ranks) -> bool:
    return ranks[-1] <= 14 and all(b - a == 1 for a, b in zip(ranks, ranks[1:]))


def _find_chain(cnt: Counter, need: int, length: int, exact: bool):
    """Highest chain of ``length`` consecutive ranks each holding >= need cards."""
    best = None
    for lo in range(3, 15 - length + 1):
        ranks = range(lo, lo + length)
        if all((cnt[r] == need) if exact else (cnt[r] >= need) for r in ranks):
            best = lo + length - 1
    return best


@lru_cache(maxsize=1 << 18)
def classify(cards: tuple) -> DouCombo | None:
    """Canonical combo for a sorted card tuple, or None if it is not a combo."""
    n = len(cards)
    if n == 0:
        return None
    cnt = Counter(cards)
    shape = sorted(cnt.values(), reverse=True)
    ranks = sorted(cnt)
    if n == 1:
        return DouCombo(SOLO, cards[0], 1, cards)
    if n == 2:
        if cards == (BLACK_JOKER, RED_JOKER):
            return DouCombo(ROCKET, RED_JOKER, 1, cards)
        if shape == [2]:
            return DouCombo(PAIR, cards[0], 1, cards)
        return None
    if shape == [3] and n == 3:
        return DouCombo(TRIO, cards[0], 1, cards)
    if n == 4:
        if shape == [4]:
            return DouCombo(BOMB, cards[0], 1, cards)
        if shape == [3, 1]:
            return DouCombo(TRIO_SOLO, ranks[0] if cnt[ranks[0]] == 3 else ranks[1], 1, cards)
        return None
    if n == 5 and shape == [3, 2]:
        trio = next(r for r in ranks if cnt[r] == 3)
        return DouCombo(TRIO_PAIR, trio, 1, cards)
    # chains
    if all(v == 1 for v in shape) and n >= 5 and _consecutive(ranks):
        return DouCombo(SOLO_CHAIN, ranks[-1], n, cards)
    if all(v == 2 for v in shape) and len(ranks) >= 3 and _consecutive(ranks):
        return DouCombo(PAIR_CHAIN, ranks[-1], len(ranks), cards)
    if all(v == 3 for v in shape) and len(ranks) >= 2 and _consecutive(ranks):
        return DouCombo(TRIO_CHAIN, ranks[-1], len(ranks), cards)
    if n == 6 and shape[0] == 4:
        four = next(r for r in ranks if cnt[r] == 4)
        if cnt[BLACK_JOKER] and cnt[RED_JOKER]:
            return None
        return DouCombo(FOUR_TWO_SOLO, four, 1, cards)
    if n == 8 and shape == [4, 2, 2]:
        four = next(r for r in ranks if cnt[r] == 4)
        return DouCombo(FOUR_TWO_PAIR, four, 1, cards)
    if n % 4 == 0 and n >= 8:
        length = n // 4
        best = None
        for lo in range(3, 15 - length + 1):
            chain = range(lo, lo + length)
            if all(cnt[r] == 3 for r in chain):
                best = lo + length - 1
        if best is not None:
            return DouCombo(TRIO_CHAIN_SOLO, best, length, cards)
    if n % 5 == 0 and n >= 10:
        length = n // 5
        top = _find_chain(cnt, 3, length, exact=True)
        if top is not None:
            rest = [r for r in ranks if not (top - length < r <= top)]
            if len(rest) == length and all(cnt[r] == 2 for r in rest):
                return DouCombo(TRIO_CHAIN_PAIR, top, length, cards)
    return None


def compare_dou(a: DouCombo, b: DouCombo) -> bool:
    """True iff ``a`` beats ``b``."""
    if a.category == ROCKET:
        return b.category != ROCKET
    if b.category == ROCKET:
        return False
    if a.category == BOMB:
        return b.category != BOMB or a.primal > b.primal
    if b.category == BOMB:
        return False
    return (
        a.category == b.category
        and len(a.cards) == len(b.cards)
        and a.length == b.length
        and a.primal > b.primal
    )


def _multisets(avail: list[tuple[int, int]], size: int, start: int = 0):
    """All multisets of ``size`` cards drawn from (rank, count) pairs."""
    if size == 0:
        yield ()
        return
    for i in range(start, len(avail)):
        r, c = avail[i]
        for take in range(min(c, size), 0, -1):
            for rest in _multisets(avail, size - take, i + 1):
                yield (r,) * take + rest


def _chains(cnt: Counter, need: int, min_len: int, max_len: int):
    out = []
    r = 3
    while r <= 14:
        if cnt[r] >= need:
            end = r
            while end + 1 <= 14 and cnt[end + 1] >= need:
                end += 1
            run = end - r + 1
            for length in range(min_len, min(run, max_len) + 1):
                for lo in range(r, end - length + 2):
                    out.append(tuple(range(lo, lo + length)))
            r = end + 1
        else:
            r += 1
    return out


def _generate(cnt: Counter, wanted: set | None) -> list[tuple]:
    """Constructive candidate generation; ``wanted`` limits categories (None = all)."""
    ranks = sorted(r for r in cnt if cnt[r] > 0)
    n_cards = sum(cnt.values())
    out = []

    def want(cat):
        return wanted is None or cat in wanted

    if want(SOLO):
        out += [(r,) for r in ranks]
    if want(PAIR):
        out += [(r, r) for r in ranks if cnt[r] >= 2]
    if want(TRIO):
        out += [(r,) * 3 for r in ranks if cnt[r] >= 3]
    if want(BOMB):
        out += [(r,) * 4 for r in ranks if cnt[r] == 4]
    if want(ROCKET) and cnt[BLACK_JOKER] and cnt[RED_JOKER]:
        out.append((BLACK_JOKER, RED_JOKER))
    if want(TRIO_SOLO):
        for t in ranks:
            if cnt[t] >= 3:
                out += [tuple(sorted((t,) * 3 + (s,))) for s in ranks if s != t]
    if want(TRIO_PAIR):
        for t in ranks:
            if cnt[t] >= 3:
                out += [tuple(sorted((t,) * 3 + (s, s))) for s in ranks if s != t and cnt[s] >= 2]
    if want(SOLO_CHAIN):
        out += _chains(cnt, 1, 5, 12)
    if want(PAIR_CHAIN):
        out += [tuple(r for r in ch for _ in range(2)) for ch in _chains(cnt, 2, 3, 10)]
    trio_chains = _chains(cnt, 3, 2, 6) if (want(TRIO_CHAIN) or want(TRIO_CHAIN_SOLO) or want(TRIO_CHAIN_PAIR)) else []
    if want(TRIO_CHAIN):
        out += [tuple(r for r in ch for _ in range(3)) for ch in trio_chains]
    if want(TRIO_CHAIN_SOLO):
        for ch in trio_chains:
            length = len(ch)
            if 4 * length > n_cards:
                continue
            body = tuple(r for r in ch for _ in range(3))
            avail = [(r, cnt[r]) for r in ranks if r not in ch]
            for kick in _multisets(avail, length):
                out.append(tuple(sorted(body + kick)))
    if want(TRIO_CHAIN_PAIR):
        for ch in trio_chains:
            length = len(ch)
            if 5 * length > n_cards:
                continue
            body = tuple(r for r in ch for _ in range(3))
            pair_ranks = [r for r in ranks if r not in ch and cnt[r] >= 2]
            for pr in combinations(pair_ranks, length):
                out.append(tuple(sorted(body + tuple(r for r in pr for _ in range(2)))))
    if want(FOUR_TWO_SOLO) or want(FOUR_TWO_PAIR):
        for f in ranks:
            if cnt[f] != 4:
                continue
            body = (f,) * 4
            others = [(r, cnt[r]) for r in ranks if r != f]
            if want(FOUR_TWO_SOLO):
                for kick in _multisets(others, 2):
                    out.append(tuple(sorted(body + kick)))
            if want(FOUR_TWO_PAIR):
                pr = [r for r, c in others if c >= 2]
                for a, b in combinations(pr, 2):
                    out.append(tuple(sorted(body + (a, a, b, b))))
    return out


def enumerate_dou_moves(hand, last_move: DouCombo | tuple | None = None) -> list[DouCombo]:
    """Playable combos from ``hand``; when following, only those beating ``last_move``.

    The returned list includes a pass (category ``"Pass"``, empty cards) iff
    ``last_move`` is present.
    """
    if isinstance(last_move, tuple):
        last_move = classify(last_move) if last_move else None
    cnt = Counter(hand)
    if last_move is None:
        cands = _generate(cnt, None)
    else:
        cands = _generate(cnt, {last_move.category, BOMB, ROCKET})
    seen = set()
    moves = []
    for c in cands:
        if c in seen:
            continue
        seen.add(c)
        combo = classify(c)
        if combo is None:
            continue
        if last_move is not None and not compare_dou(combo, last_move):
            continue
        moves.append(combo)
    moves.sort(key=lambda m: (len(m.cards), m.cards))
    if last_move is not None:
        moves.insert(0, DouCombo("Pass", 0, 0, PASS))
    return moves


def dou_legal_moves(hand, last_move: tuple | None) -> list[tuple]:
    return [m.cards for m in enumerate_dou_moves(hand, last_move)]


def format_dou_cards(cards) -> str:
    return "".join(DOU_INT_TO_RANK[c] for c in cards)


class DouState(State):
    def __init__(self):
        self.game = GameId.DOUDIZHU
        self._legal = None

    def copy(self):
        s = DouState()
        s.hands = [list(h) for h in self.hands]
        s.seat = self.seat
        s.last_move = self.last_move
        s.last_mover = self.last_mover
        s.passes = self.passes
        s.played = [list(p) for p in self.played]
        s.bombs = self.bombs
        s.history = list(self.history)
        s.terminal = self.terminal
        s.payoffs = self.payoffs
        s.landlord_cards = self.landlord_cards
        return s


@register
class DouDizhu(Engine):
    game = GameId.DOUDIZHU
    num_players = 3
    roles = ROLES
    max_steps = 200

    def reset(self, seed: int, deal=None, **_) -> DouState:
        s = DouState()
        if deal is None:
            deck = dou_deck_ints()
            random.Random(seed).shuffle(deck)
            deal = (deck[:20], deck[20:37], deck[37:])
        s.hands = [sorted(h) for h in deal]
        # the three extra cards are public once dealt to the landlord
        s.landlord_cards = tuple(sorted(deal[0][17:20]))
        s.seat = 0
        s.last_move = None
        s.last_mover = None
        s.passes = 0
        s.played = [[], [], []]
        s.bombs = 0
        s.history = []
        s.terminal = False
        s.payoffs = None
        return s

    def _legal(self, s: DouState) -> list:
        return dou_legal_moves(s.hands[s.seat], s.last_move)

    def _apply(self, s: DouState, action: tuple) -> None:
        seat = s.seat
        if action:
            hand = s.hands[seat]
            for c in action:
                hand.remove(c)
            s.played[seat].extend(action)
            s.played[seat].sort()
            s.last_move = action
            s.last_mover = seat
            s.passes = 0
            if classify(action).is_bomb:
                s.bombs += 1
            if not hand:
                s.terminal = True
                s.payoffs = (1.0, -0.5, -0.5) if seat == 0 else (-1.0, 0.5, 0.5)
                return
        else:
            s.passes += 1
            if s.passes == 2:
                # two consecutive passes close the trick; the last mover leads
                s.last_move = None
                s.passes = 0
        s.seat = (seat + 1) % 3

    def winners(self, s) -> set[int]:
        pay = self.payoffs(s)
        return {0} if pay[0] > 0 else {1, 2}

    def winner_side(self, s) -> str:
        return "landlord" if self.payoffs(s)[0] > 0 else "farmer"

    def card_zones(self, s) -> Counter:
        return Counter(chain(*s.hands, *s.played))

    def full_deck(self) -> Counter:
        return Counter(dou_deck_ints())

    def observe(self, s: DouState, seat: int | None = None) -> Observation:
        seat = s.seat if seat is None else seat
        others = sorted(c for i, h in enumerate(s.hands) if i != seat for c in h)
        legal = [list(a) for a in self.legal_actions(s)] if not s.terminal and seat == s.seat else []
        fields = {
            "turn": len(s.history),
            "role": ROLES[seat],
            "hand": list(s.hands[seat]),
            "others_hand": others,
            "last_move": list(s.last_move) if s.last_move else [],
            "played_cards": {ROLES[i]: list(s.played[i]) for i in range(3)},
            "num_cards_left": {ROLES[i]: len(s.hands[i]) for i in range(3)},
            "num_bombs": s.bombs,
            "history": [[ROLES[i], list(a)] for i, a in s.history],
            "legal_actions": legal,
        }
        return Observation(self.game.value, seat, ROLES[seat], fields)

