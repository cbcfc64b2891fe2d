"""Card, suit, rank and deck primitives with their text notation.

French cards and jokers use a two-character suit+rank notation
(``S2``, ``HQ``, ``ST`` for the ten, ``SB`` black joker, ``HR`` red joker).
Uno cards use ``color-face`` (``r-3``, ``g-skip``, ``b-draw_2``, ``y-wild``,
``r-wild_draw_4``); wild cards carry a nominal color so every physical card
has a unique printable identity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from cardlab.errors import UnknownNotation, UnsupportedGame


class GameId(str, Enum):
    DOUDIZHU = "doudizhu"
    GUANDAN = "guandan"
    UNO = "uno"
    GIN_RUMMY = "gin_rummy"
    LEDUC = "leduc"
    LIMIT = "limit"
    NOLIMIT = "nolimit"
    MAHJONG = "mahjong"


ENGINE_GAMES = (
    GameId.DOUDIZHU,
    GameId.GUANDAN,
    GameId.UNO,
    GameId.GIN_RUMMY,
    GameId.LEDUC,
    GameId.LIMIT,
    GameId.NOLIMIT,
)

# order used in the eight-game mixture
ALL_GAMES = (
    GameId.DOUDIZHU,
    GameId.GUANDAN,
    GameId.MAHJONG,
    GameId.UNO,
    GameId.GIN_RUMMY,
    GameId.LEDUC,
    GameId.LIMIT,
    GameId.NOLIMIT,
)

_ALIASES = {
    "dou": GameId.DOUDIZHU,
    "dou_dizhu": GameId.DOUDIZHU,
    "guan": GameId.GUANDAN,
    "gin": GameId.GIN_RUMMY,
    "ginrummy": GameId.GIN_RUMMY,
    "leduc_holdem": GameId.LEDUC,
    "limit_holdem": GameId.LIMIT,
    "no_limit": GameId.NOLIMIT,
    "nolimit_holdem": GameId.NOLIMIT,
    "riichi": GameId.MAHJONG,
    "riichi_mahjong": GameId.MAHJONG,
}


def game_id(name) -> GameId:
    if isinstance(name, GameId):
        return name
    key = str(name).strip().lower().replace("-", "_").replace("'", "")
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return GameId(key)
    except ValueError:
        raise UnsupportedGame(f"unknown game {name!r}") from None


SUITS = "SHCD"
RANKS = "A23456789TJQK"
JOKER_RANKS = "BR"
BLACK_JOKER = "SB"
RED_JOKER = "HR"

UNO_COLORS = "rygb"
UNO_COLOR_NAMES = {"r": "red", "y": "yellow", "g": "green", "b": "blue"}
UNO_ACTION_FACES = ("skip", "reverse", "draw_2")
UNO_WILD_FACES = ("wild", "wild_draw_4")
UNO_FACES = tuple("0123456789") + UNO_ACTION_FACES + UNO_WILD_FACES


@dataclass(frozen=True, order=True)
class Card:
    """A French card, a joker, or an Uno card.

    Exactly one of (suit, rank) or (color, face) is set.
    """

    suit: str | None = None
    rank: str | None = None
    color: str | None = None
    face: str | None = None

    def __post_init__(self):
        french = self.suit is not None or self.rank is not None
        uno = self.color is not None or self.face is not None
        if french == uno:
            raise UnknownNotation(f"card must be French/joker xor Uno: {self!r}")
        if french:
            if self.rank in JOKER_RANKS:
                if (self.suit, self.rank) not in (("S", "B"), ("H", "R")):
                    raise UnknownNotation(f"bad joker {self.suit}{self.rank}")
            elif self.suit not in tuple(SUITS) or self.rank is None or self.rank not in tuple(RANKS):
                raise UnknownNotation(f"bad French card {self.suit}{self.rank}")
        else:
            if self.color not in tuple(UNO_COLORS) or self.face not in UNO_FACES:
                raise UnknownNotation(f"bad Uno card {self.color}-{self.face}")

    @property
    def is_joker(self) -> bool:
        return self.rank in ("B", "R") if self.rank else False

    @property
    def is_uno(self) -> bool:
        return self.face is not None

    def __str__(self):
        return format_card(self)


def parse_card(text: str) -> Card:
    if not text:
        raise UnknownNotation("empty card notation")
    if "-" in text:
        color, _, face = text.partition("-")
        if color not in tuple(UNO_COLORS) or face not in UNO_FACES:
            raise UnknownNotation(text)
        return Card(color=color, face=face)
    if len(text) != 2:
        raise UnknownNotation(text)
    suit, rank = text[0], text[1]
    if rank in JOKER_RANKS:
        if text not in (BLACK_JOKER, RED_JOKER):
            raise UnknownNotation(text)
        return Card(suit=suit, rank=rank)
    if suit not in SUITS or rank not in RANKS:
        raise UnknownNotation(text)
    return Card(suit=suit, rank=rank)


def format_card(card: Card) -> str:
    if card.face is not None:
        return f"{card.color}-{card.face}"
    return f"{card.suit}{card.rank}"


def french_deck() -> list[str]:
    return [s + r for s in SUITS for r in RANKS]


def uno_deck() -> list[str]:
    cards = []
    for c in UNO_COLORS:
        cards.append(f"{c}-0")
        for face in "123456789":
            cards += [f"{c}-{face}"] * 2
        for face in UNO_ACTION_FACES:
            cards += [f"{c}-{face}"] * 2
        # one Wild and one Wild Draw Four per nominal color: four of each in total
        cards.append(f"{c}-wild")
        cards.append(f"{c}-wild_draw_4")
    return cards


def deck_notation(game) -> list[str]:
    """Notation strings for a fresh deck, in a fixed canonical order."""
    g = game_id(game)
    if g is GameId.DOUDIZHU:
        return french_deck() + [BLACK_JOKER, RED_JOKER]
    if g is GameId.GUANDAN:
        return (french_deck() + [BLACK_JOKER, RED_JOKER]) * 2
    if g is GameId.UNO:
        return uno_deck()
    if g in (GameId.GIN_RUMMY, GameId.LIMIT, GameId.NOLIMIT):
        return french_deck()
    if g is GameId.LEDUC:
        return ["SJ", "HJ", "SQ", "HQ", "SK", "HK"]
    raise UnsupportedGame(f"no deck for {g.value}")


@dataclass(frozen=True)
class Deck:
    game: GameId
    cards: tuple[Card, ...]

    def __len__(self):
        return len(self.cards)

    def counts(self) -> Counter:
        return Counter(format_card(c) for c in self.cards)


def build_deck(game) -> Deck:
    g = game_id(game)
    return Deck(g, tuple(parse_card(t) for t in deck_notation(g)))


# DouDizhu integer encoding: 3..14 for 3..A, 17 for 2, 20 black joker, 30 red joker.
DOU_RANK_TO_INT = {
    "3": 3, "4": 4, "5": 5, "6": 6, "7": 7, "8": 8, "9": 9,
    "T": 10, "J": 11, "Q": 12, "K": 13, "A": 14, "2": 17, "B": 20, "R": 30,
}
DOU_INT_TO_RANK = {v: k for k, v in DOU_RANK_TO_INT.items()}


def dou_int(card: Card | str) -> int:
    if isinstance(card, str):
        card = parse_card(card)
    if card.rank is None:
        raise UnknownNotation(f"not a DouDizhu card: {card}")
    return DOU_RANK_TO_INT[card.rank]


def dou_deck_ints() -> list[int]:
    return sorted(dou_int(c) for c in deck_notation(GameId.DOUDIZHU))


def gin_notation(card: str) -> str:
    """Gin Rummy action strings write rank before suit (``3S``)."""
    return card[1] + card[0]


def from_gin_notation(text: str) -> str:
    if len(text) != 2:
        raise UnknownNotation(text)
    card = text[1] + text[0]
    parse_card(card)
    return card
