"""Five-to-seven card poker hand evaluation.

A ``HandRank`` compares as (category, tiebreak). The tiebreak lists the
distinct ranks that decide the hand, most significant first: the quad
rank then kicker, trips then pair, pairs then kicker, or the top card of a
straight (5 for the wheel).
"""

from __future__ import annotations

from enum import IntEnum
from itertools import combinations
from typing import NamedTuple

from cardlab.errors import BadCardCount, DuplicateCard, UnknownNotation

RANK_VALUE = {r: i for i, r in enumerate("23456789TJQKA", start=2)}


class Category(IntEnum):
    HIGH_CARD = 0
    ONE_PAIR = 1
    TWO_PAIR = 2
    THREE_OF_A_KIND = 3
    STRAIGHT = 4
    FLUSH = 5
    FULL_HOUSE = 6
    FOUR_OF_A_KIND = 7
    STRAIGHT_FLUSH = 8
    ROYAL_FLUSH = 9


CATEGORY_NAMES = {
    Category.ROYAL_FLUSH: "RoyalFlush",
    Category.STRAIGHT_FLUSH: "StraightFlush",
    Category.FOUR_OF_A_KIND: "FourOfAKind",
    Category.FULL_HOUSE: "FullHouse",
    Category.FLUSH: "Flush",
    Category.STRAIGHT: "Straight",
    Category.THREE_OF_A_KIND: "ThreeOfAKind",
    Category.TWO_PAIR: "TwoPair",
    Category.ONE_PAIR: "OnePair",
    Category.HIGH_CARD: "HighCard",
}


class HandRank(NamedTuple):
    category: Category
    tiebreak: tuple[int, ...]

    @property
    def name(self) -> str:
        return CATEGORY_NAMES[self.category]


def _straight_top(mask: int) -> int:
    """Highest straight top in a rank bitmask (bit r set for rank r), or 0."""
    if mask >> 14 & 1:
        mask |= 2  # the ace also plays low
    for top in range(14, 4, -1):
        window = 0b11111 << (top - 4)
        if mask & window == window:
            return top
    return 0


def _parse(card: str) -> tuple[int, str]:
    if len(card) != 2 or card[0] not in "SHCD" or card[1] not in RANK_VALUE:
        raise UnknownNotation(f"not a poker card: {card!r}")
    return RANK_VALUE[card[1]], card[0]


def rank_cards(parsed) -> HandRank:
    """Evaluate pre-parsed (rank, suit) pairs, 5 to 7 of them."""
    counts = {}
    suits = {}
    for r, s in parsed:
        counts[r] = counts.get(r, 0) + 1
        suits.setdefault(s, []).append(r)

    for rs in suits.values():
        if len(rs) >= 5:
            fmask = 0
            for r in rs:
                fmask |= 1 << r
            top = _straight_top(fmask)
            if top == 14:
                return HandRank(Category.ROYAL_FLUSH, (14,))
            if top:
                return HandRank(Category.STRAIGHT_FLUSH, (top,))
            flush = tuple(sorted(rs, reverse=True)[:5])
            break
    else:
        flush = None

    # ranks grouped by multiplicity, larger groups and higher ranks first
    groups = sorted(counts.items(), key=lambda kv: (kv[1], kv[0]), reverse=True)
    quads = [r for r, n in groups if n == 4]
    trips = [r for r, n in groups if n == 3]
    pairs = [r for r, n in groups if n == 2]

    if quads:
        q = quads[0]
        kicker = max(r for r in counts if r != q)
        return HandRank(Category.FOUR_OF_A_KIND, (q, kicker))
    if trips and (len(trips) > 1 or pairs):
        t = trips[0]
        p = max([r for r in trips[1:]] + pairs)
        return HandRank(Category.FULL_HOUSE, (t, p))
    if flush:
        return HandRank(Category.FLUSH, flush)
    mask = 0
    for r in counts:
        mask |= 1 << r
    top = _straight_top(mask)
    if top:
        return HandRank(Category.STRAIGHT, (top,))
    singles = sorted(counts, reverse=True)
    if trips:
        t = trips[0]
        return HandRank(Category.THREE_OF_A_KIND, (t,) + tuple(r for r in singles if r != t)[:2])
    if len(pairs) >= 2:
        hi, lo = pairs[0], pairs[1]
        kicker = max(r for r in counts if r != hi and r != lo)
        return HandRank(Category.TWO_PAIR, (hi, lo, kicker))
    if pairs:
        p = pairs[0]
        return HandRank(Category.ONE_PAIR, (p,) + tuple(r for r in singles if r != p)[:3])
    return HandRank(Category.HIGH_CARD, tuple(singles[:5]))


def evaluate_hand(cards) -> HandRank:
    """Best five-card rank among 5 to 7 distinct cards in suit+rank notation."""
    cards = list(cards)
    if not 5 <= len(cards) <= 7:
        raise BadCardCount(f"need 5 to 7 cards, got {len(cards)}")
    if len(set(cards)) != len(cards):
        raise DuplicateCard(f"duplicate card in {cards}")
    return rank_cards([_parse(c) for c in cards])


def best_of_subsets(cards) -> HandRank:
    """Brute-force reference: maximum over every 5-card subset."""
    return max(evaluate_hand(list(c)) for c in combinations(cards, 5))
