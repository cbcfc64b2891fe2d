"""GuanDan: wild-card combo enumeration, level-aware comparison, deals, tribute and levels.

Cards are two-character strings (``S2``, ``HT``, ``SB``, ``HR``) from two full
decks. A move is a :class:`GuanCombo` serialised as ``[Type, Rank, Cards]``.
Straight flushes and the joker bomb use type ``Boom`` (the template's type
list has no separate entry for them); a 5-card ``Boom`` whose natural cards do
not share one rank is a straight flush.
"""

from __future__ import annotations

import random
from collections import Counter
from itertools import chain
from dataclasses import dataclass, field
from typing import NamedTuple

from cardlab.cards import GameId, deck_notation
from cardlab.core import Engine, Observation, State, derive_seed, register

RANK_CHARS = "23456789TJQKA"
NATURAL = {c: i for i, c in enumerate(RANK_CHARS, start=2)}  # A = 14
SUIT_ORDER = {"S": 0, "H": 1, "C": 2, "D": 3}
TEAMS = ((0, 2), (1, 3))

SINGLE, PAIR, TRIPS = "Single", "Pair", "Trips"
THREE_PAIR, THREE_WITH_TWO, TRIPS_PAIR = "ThreePair", "ThreeWithTwo", "TripsPair"
STRAIGHT, BOOM = "Straight", "Boom"
PASS_T, TRIBUTE, BACK = "PASS", "tribute", "back"
TYPES = (SINGLE, PAIR, TRIPS, THREE_PAIR, THREE_WITH_TWO, TRIPS_PAIR, STRAIGHT, BOOM, PASS_T, TRIBUTE, BACK)
_TYPE_ORDER = {t: i for i, t in enumerate(TYPES)}
SEQUENCE_TYPES = (STRAIGHT, THREE_PAIR, TRIPS_PAIR)

# partner's finishing place (2nd, 3rd, 4th) -> level increment
LEVEL_INCREMENTS = {1: 3, 2: 2, 3: 1}


class GuanCombo(NamedTuple):
    type: str
    rank: str
    cards: tuple

    def to_json(self):
        if self.type == PASS_T:
            return [PASS_T, PASS_T, PASS_T]
        return [self.type, self.rank, list(self.cards)]

    @classmethod
    def from_json(cls, value) -> "GuanCombo":
        t, r, cards = value
        if t == PASS_T:
            return PASS
        return cls(t, r, tuple(cards))


PASS = GuanCombo(PASS_T, PASS_T, ())


@dataclass(frozen=True)
class LevelContext:
    level: int = 2  # rank value of the current level, 2..14
    level_char: str = field(init=False, repr=False, compare=False)
    wild: str = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        char = RANK_CHARS[self.level - 2]
        object.__setattr__(self, "level_char", char)
        object.__setattr__(self, "wild", "H" + char)

    def value(self, rank: str) -> int:
        """Level-aware single-card order: 2..A, then level cards, then jokers."""
        if rank == "B":
            return 16
        if rank == "R":
            return 17
        if rank == self.level_char:
            return 15
        return NATURAL[rank]


# sequence positions 1..14, where the ace sits at both ends
_POS_CHARS = ("", "A") + tuple(RANK_CHARS[:-1]) + ("A",)


def _pos_char(p: int) -> str:
    return _POS_CHARS[p]


def _position(rank: str) -> int:
    return NATURAL[rank]


def wilds_used(combo: GuanCombo, ctx: LevelContext) -> int:
    if combo.type in (SINGLE, PASS_T, TRIBUTE, BACK):
        return 0
    n = sum(1 for c in combo.cards if c == ctx.wild)
    if combo.rank == ctx.level_char and combo.type in (PAIR, TRIPS, BOOM) and not is_straight_flush(combo, ctx):
        return 0  # hearts of the level standing for their own rank
    return n


def is_straight_flush(combo: GuanCombo, ctx: LevelContext) -> bool:
    if combo.type != BOOM or len(combo.cards) != 5:
        return False
    natural = [c for c in combo.cards if c != ctx.wild]
    return any(c[1] != combo.rank for c in natural)


def is_bomb(combo: GuanCombo) -> bool:
    return combo.type == BOOM


def bomb_key(combo: GuanCombo, ctx: LevelContext) -> tuple:
    n = len(combo.cards)
    if combo.rank == "R" and n == 4 and all(c[1] in "BR" for c in combo.cards):
        return (11.0, 0)
    if is_straight_flush(combo, ctx):
        return (5.5, _position(combo.rank))
    return (float(n), ctx.value(combo.rank))


def normal_key(combo: GuanCombo, ctx: LevelContext) -> int:
    if combo.type in SEQUENCE_TYPES:
        return _position(combo.rank)
    return ctx.value(combo.rank)


def compare_guan(a: GuanCombo, b: GuanCombo, ctx: LevelContext) -> bool:
    """True iff ``a`` beats ``b``."""
    if a.type in (PASS_T, TRIBUTE, BACK):
        return False
    if b.type == PASS_T:
        return True
    if a.type == BOOM:
        return b.type != BOOM or bomb_key(a, ctx) > bomb_key(b, ctx)
    if b.type == BOOM:
        return False
    return a.type == b.type and len(a.cards) == len(b.cards) and normal_key(a, ctx) > normal_key(b, ctx)


def _card_sort_key(card: str):
    r = card[1]
    v = 16 if r == "B" else 17 if r == "R" else NATURAL[r]
    return (v, SUIT_ORDER[card[0]])


def sort_cards(cards) -> list[str]:
    return sorted(cards, key=_card_sort_key)


class _HandIndex:
    def __init__(self, hand, ctx: LevelContext):
        self.ctx = ctx
        self.wilds = [c for c in hand if c == ctx.wild]
        self.w = len(self.wilds)
        self.nat: dict[str, list[str]] = {r: [] for r in RANK_CHARS}
        self.jokers = Counter()
        self.by_suit: dict[tuple[str, str], list[str]] = {}
        for c in sort_cards(hand):
            if c == ctx.wild:
                continue
            if c[1] in "BR":
                self.jokers[c] += 1
            else:
                self.nat[c[1]].append(c)
                self.by_suit.setdefault((c[0], c[1]), []).append(c)

    def take(self, rank: str, k: int):
        """k cards of ``rank`` using naturals first, or None if impossible."""
        nat = self.nat[rank]
        if not nat and rank != self.ctx.level_char:
            return None
        use = nat[:k]
        missing = k - len(use)
        if missing > self.w:
            return None
        return use, missing


def _sequence(index: _HandIndex, start: int, width: int, need: int):
    cards = []
    missing = 0
    for p in range(start, start + width):
        r = _pos_char(p)
        nat = index.nat[r][:need]
        cards += nat
        missing += need - len(nat)
        if missing > index.w:
            return None
    return cards + index.wilds[:missing]


def enumerate_guan_moves(hand, last_move: GuanCombo | None, ctx: LevelContext) -> list[GuanCombo]:
    """Legal plays from ``hand``. Each (type, rank) appears once, built with the
    fewest wild cards; straight flushes appear once per suit. PASS is included
    iff ``last_move`` is present."""
    if last_move is not None and last_move.type == PASS_T:
        last_move = None
    ix = _HandIndex(hand, ctx)
    W = ix.wilds
    out: list[GuanCombo] = []
    want_all = last_move is None
    lt = None if want_all else last_move.type

    def want(t):
        return want_all or (lt == t and lt != BOOM)

    ranks_present = [r for r in RANK_CHARS if ix.nat[r] or (r == ctx.level_char and ix.w)]

    if want(SINGLE):
        for r in RANK_CHARS:
            if ix.nat[r]:
                out.append(GuanCombo(SINGLE, r, (ix.nat[r][0],)))
            elif r == ctx.level_char and ix.w:
                out.append(GuanCombo(SINGLE, r, (W[0],)))
        for j in ("SB", "HR"):
            if ix.jokers[j]:
                out.append(GuanCombo(SINGLE, j[1], (j,)))
    for t, k in ((PAIR, 2), (TRIPS, 3)):
        if want(t):
            for r in ranks_present:
                got = ix.take(r, k)
                if got:
                    use, miss = got
                    out.append(GuanCombo(t, r, tuple(use + W[:miss])))
            if t == PAIR:
                for j in ("SB", "HR"):
                    if ix.jokers[j] == 2:
                        out.append(GuanCombo(PAIR, j[1], (j, j)))
    if want(THREE_WITH_TWO):
        for tr in ranks_present:
            got = ix.take(tr, 3)
            if not got:
                continue
            use_t, miss_t = got
            for pr in ranks_present:
                if pr == tr:
                    continue
                nat = ix.nat[pr]
                if not nat and pr != ctx.level_char:
                    continue
                use_p = nat[:2]
                miss_p = 2 - len(use_p)
                if miss_t + miss_p > ix.w:
                    continue
                cards = use_t + W[:miss_t] + use_p + W[miss_t:miss_t + miss_p]
                out.append(GuanCombo(THREE_WITH_TWO, tr, tuple(cards)))
    for t, width, need, last_start in ((STRAIGHT, 5, 1, 10), (THREE_PAIR, 3, 2, 12), (TRIPS_PAIR, 2, 3, 13)):
        if want(t):
            for s in range(1, last_start + 1):
                cards = _sequence(ix, s, width, need)
                if cards is not None:
                    out.append(GuanCombo(t, _pos_char(s + width - 1), tuple(cards)))
    # bombs answer anything
    for r in ranks_present:
        have = len(ix.nat[r]) + ix.w
        for n in range(4, have + 1):
            got = ix.take(r, n)
            if got:
                use, miss = got
                out.append(GuanCombo(BOOM, r, tuple(use + W[:miss])))
    if ix.jokers["SB"] == 2 and ix.jokers["HR"] == 2:
        out.append(GuanCombo(BOOM, "R", ("SB", "SB", "HR", "HR")))
    for suit in "SHCD":
        present = 0
        for p in range(1, 15):
            if (suit, _POS_CHARS[p]) in ix.by_suit:
                present |= 1 << p
        if bin(present).count("1") + ix.w < 5:
            continue
        for s in range(1, 11):
            window = present >> s & 0b11111
            missing = 5 - bin(window).count("1")
            if missing > ix.w or missing == 5:
                continue
            cards = [ix.by_suit[(suit, _POS_CHARS[p])][0] for p in range(s, s + 5) if window >> (p - s) & 1]
            combo = GuanCombo(BOOM, _POS_CHARS[s + 4], tuple(cards + W[:missing]))
            if is_straight_flush(combo, ctx):
                out.append(combo)
    seen = set()
    moves = []
    for m in out:
        key = (m.type, m.rank, tuple(sorted(m.cards)))
        if key in seen:
            continue
        seen.add(key)
        if last_move is not None and not compare_guan(m, last_move, ctx):
            continue
        moves.append(m)
    moves.sort(key=lambda m: (_TYPE_ORDER[m.type], len(m.cards), normal_key(m, ctx) if m.type != BOOM else bomb_key(m, ctx)[1], m.cards))
    if last_move is not None:
        moves.insert(0, PASS)
    return moves


def team_of(seat: int) -> int:
    return seat % 2


def partner(seat: int) -> int:
    return (seat + 2) % 4


class GuanState(State):
    def __init__(self):
        self.game = GameId.GUANDAN
        self._legal = None

    def copy(self):
        s = GuanState()
        s.__dict__.update(self.__dict__)
        s.hands = [list(h) for h in self.hands]
        s.played = [list(p) for p in self.played]
        s.finished = list(self.finished)
        s.levels = list(self.levels)
        s.history = list(self.history)
        s.deal_results = list(self.deal_results)
        s.deal_history = list(self.deal_history)
        s.pending = list(self.pending)
        s.tribute_given = dict(self.tribute_given)
        s.last_action = list(self.last_action)
        s._legal = None
        return s


@register
class GuanDan(Engine):
    """A full GuanDan match: deals continue until a team wins a deal while at
    level A, or until ``max_deals`` deals have been played."""

    game = GameId.GUANDAN
    num_players = 4
    roles = ("player_0", "player_1", "player_2", "player_3")
    max_steps = 600  # per deal

    def __init__(self, max_deals: int | None = None, level_increments: dict | None = None):
        self.max_deals = max_deals
        self.increments = dict(level_increments or LEVEL_INCREMENTS)

    def reset(self, seed: int, max_deals: int | None = None, levels=(2, 2), leader: int | None = None,
              hands=None, previous_order=None, **_) -> GuanState:
        s = GuanState()
        s.seed = seed
        s.max_deals = max_deals if max_deals is not None else self.max_deals
        s.levels = list(levels)
        s.level = max(levels)
        s.deal_index = 0
        s.deal_results = []
        s.history = []
        s.terminal = False
        s.payoffs = None
        s.order = []
        rng = random.Random(derive_seed(seed, "deal", 0))
        self._deal(s, rng, hands)
        if previous_order is not None:
            self._start_tribute(s, list(previous_order))
        else:
            s.seat = rng.randrange(4) if leader is None else leader
        return s

    def ctx(self, s) -> LevelContext:
        return LevelContext(s.level)

    def _deal(self, s: GuanState, rng: random.Random, hands=None):
        if hands is None:
            deck = deck_notation(GameId.GUANDAN)
            rng.shuffle(deck)
            hands = [deck[i * 27:(i + 1) * 27] for i in range(4)]
        s.hands = [sort_cards(h) for h in hands]
        s.played = [[], [], [], []]
        s.finished = []
        s.last_move = None
        s.last_mover = None
        s.passes = 0
        s.phase = "play"
        s.pending = []
        s.tribute_given = {}
        s.deal_history = []
        s.last_action = [None, None, None, None]

    # -- tribute -------------------------------------------------------------------

    def _start_tribute(self, s: GuanState, order: list[int]):
        banker, follower = order[0], order[1]
        if team_of(banker) == team_of(follower):
            payers = [order[2], order[3]]
        else:
            payers = [order[3]]
        reds = sum(s.hands[p].count("HR") for p in payers)
        if reds == 2:
            s.phase = "play"
            s.seat = banker
            s.tribute_info = {"anti_tribute": True, "payers": payers}
            return
        s.phase = "tribute"
        s.tribute_info = {"anti_tribute": False, "payers": payers, "order": order}
        s.pending = list(payers)
        s.seat = payers[0]

    def tribute_candidates(self, s: GuanState, seat: int) -> list[str]:
        ctx = self.ctx(s)
        cands = [c for c in s.hands[seat] if c != ctx.wild]
        top = max(ctx.value(c[1]) for c in cands)
        return sorted({c for c in cands if ctx.value(c[1]) == top}, key=_card_sort_key)

    def back_candidates(self, s: GuanState, seat: int) -> list[str]:
        ctx = self.ctx(s)
        low = sorted({c for c in s.hands[seat] if c[1] in "23456789T" and c != ctx.wild}, key=_card_sort_key)
        if low:
            return low
        return sorted({c for c in s.hands[seat] if c != ctx.wild} or set(s.hands[seat]), key=_card_sort_key)

    def _resolve_tribute(self, s: GuanState):
        ctx = self.ctx(s)
        info = s.tribute_info
        order = info["order"]
        banker, follower = order[0], order[1]
        payers = info["payers"]
        if len(payers) == 1:
            p = payers[0]
            assignments = [(p, banker)]
            s.next_leader = p
        else:
            a, b = payers
            ca, cb = s.tribute_given[a], s.tribute_given[b]
            if ctx.value(cb[1]) > ctx.value(ca[1]):
                a, b = b, a
            assignments = [(a, banker), (b, follower)]
            s.next_leader = a
        for giver, receiver in assignments:
            card = s.tribute_given[giver]
            s.hands[receiver].append(card)
            s.hands[receiver] = sort_cards(s.hands[receiver])
        info["assignments"] = assignments
        s.phase = "back"
        s.pending = [receiver for _, receiver in assignments]
        s.back_to = {receiver: giver for giver, receiver in assignments}
        s.seat = s.pending[0]

    # -- engine interface ------------------------------------------------------------

    def _legal(self, s: GuanState) -> list:
        seat = s.seat
        if s.phase == "tribute":
            return [GuanCombo(TRIBUTE, c[1], (c,)) for c in self.tribute_candidates(s, seat)]
        if s.phase == "back":
            return [GuanCombo(BACK, c[1], (c,)) for c in self.back_candidates(s, seat)]
        return enumerate_guan_moves(s.hands[seat], s.last_move, self.ctx(s))

    def _active(self, s) -> list[int]:
        return [i for i in range(4) if i not in s.finished]

    def _next_active(self, s, seat: int) -> int:
        for k in range(1, 5):
            n = (seat + k) % 4
            if n not in s.finished:
                return n
        return seat

    def _apply(self, s: GuanState, action: GuanCombo) -> None:
        seat = s.seat
        s.deal_history.append((seat, action))
        if s.phase == "tribute":
            card = action.cards[0]
            s.hands[seat].remove(card)
            s.tribute_given[seat] = card
            s.pending.pop(0)
            if s.pending:
                s.seat = s.pending[0]
            else:
                self._resolve_tribute(s)
            return
        if s.phase == "back":
            card = action.cards[0]
            s.hands[seat].remove(card)
            giver = s.back_to[seat]
            s.hands[giver].append(card)
            s.hands[giver] = sort_cards(s.hands[giver])
            s.pending.pop(0)
            if s.pending:
                s.seat = s.pending[0]
            else:
                s.phase = "play"
                s.seat = s.next_leader
            return
        s.last_action[seat] = action
        if action.type == PASS_T:
            s.passes += 1
            others = len(self._active(s)) - (0 if s.last_mover in s.finished else 1)
            if s.passes >= others:
                lm = s.last_mover
                s.last_move = None
                s.passes = 0
                if lm not in s.finished:
                    s.seat = lm
                elif partner(lm) not in s.finished:
                    s.seat = partner(lm)
                else:
                    s.seat = self._next_active(s, lm)
                return
            s.seat = self._next_active(s, seat)
            return
        hand = s.hands[seat]
        for c in action.cards:
            hand.remove(c)
        s.played[seat].extend(action.cards)
        s.last_move = action
        s.last_mover = seat
        s.passes = 0
        if not hand:
            s.finished.append(seat)
            if len(s.finished) == 3:
                self._end_deal(s)
                return
        s.seat = self._next_active(s, seat)

    def _end_deal(self, s: GuanState):
        order = s.finished + [i for i in range(4) if i not in s.finished]
        banker = order[0]
        team = team_of(banker)
        place = order.index(partner(banker))
        s.deal_results.append({"order": order, "team": team, "level": s.level})
        s.order = order
        was_at_a = s.levels[team] == 14
        s.levels[team] = min(14, s.levels[team] + self.increments[place])
        s.deal_index += 1
        if was_at_a or (s.max_deals is not None and s.deal_index >= s.max_deals):
            s.terminal = True
            s.payoffs = tuple(1.0 if team_of(i) == team else -1.0 for i in range(4))
            return
        s.level = s.levels[team]
        rng = random.Random(derive_seed(s.seed, "deal", s.deal_index))
        self._deal(s, rng)
        self._start_tribute(s, order)

    def winners(self, s) -> set[int]:
        pay = self.payoffs(s)
        return {i for i in range(4) if pay[i] > 0}

    def winner_side(self, s) -> str:
        return f"team_{team_of(min(self.winners(s)))}"

    def card_zones(self, s) -> Counter:
        c = Counter(chain(*s.hands, *s.played))
        if s.phase == "tribute":
            c.update(s.tribute_given.values())
        return c

    def observe(self, s: GuanState, seat: int | None = None) -> Observation:
        seat = s.seat if seat is None else seat
        down, mate, up = (seat + 1) % 4, (seat + 2) % 4, (seat + 3) % 4
        others = sort_cards(c for i in (down, mate, up) for c in s.hands[i])
        last = s.last_move if (s.phase == "play" and s.last_move is not None) else PASS
        mate_last = s.last_action[mate] or PASS
        char = lambda v: RANK_CHARS[v - 2]  # noqa: E731
        fields = {
            "position": seat,
            "hand": list(s.hands[seat]),
            "remaining_cards": others,
            "last_action": last.to_json(),
            "teammate_last_action": mate_last.to_json(),
            "num_cards_left": [len(s.hands[down]), len(s.hands[mate]), len(s.hands[up])],
            "played_down": list(s.played[down]),
            "played_teammate": list(s.played[mate]),
            "played_up": list(s.played[up]),
            "self_rank": char(s.levels[team_of(seat)]),
            "opponent_rank": char(s.levels[1 - team_of(seat)]),
            "current_rank": char(s.level),
            "legal_actions": [a.to_json() for a in self.legal_actions(s)] if not s.terminal and seat == s.seat else [],
        }
        return Observation(self.game.value, seat, self.roles[seat], fields)
