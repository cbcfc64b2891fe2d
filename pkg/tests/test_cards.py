from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cardlab.cards import (
    ENGINE_GAMES,
    Card,
    GameId,
    build_deck,
    deck_notation,
    dou_deck_ints,
    dou_int,
    format_card,
    from_gin_notation,
    gin_notation,
    parse_card,
)
from cardlab.errors import UnknownNotation, UnsupportedGame


def test_parse_examples():
    assert parse_card("S2") == Card(suit="S", rank="2")
    assert parse_card("HR") == Card(suit="H", rank="R")
    assert parse_card("HR").is_joker
    assert parse_card("ST") == Card(suit="S", rank="T")


def test_format_examples():
    assert format_card(Card(suit="S", rank="2")) == "S2"
    assert format_card(Card(suit="S", rank="B")) == "SB"
    assert format_card(Card(suit="H", rank="Q")) == "HQ"
    assert format_card(Card(color="g", face="skip")) == "g-skip"


@pytest.mark.parametrize("text", ["", "S", "S10", "X2", "S1", "HB", "SR", "q-3", "r-11", "r-", "-3", "s2"])
def test_parse_rejects_outside_alphabet(text):
    with pytest.raises(UnknownNotation):
        parse_card(text)


def test_card_is_exactly_one_kind():
    with pytest.raises(UnknownNotation):
        Card(suit="S", rank="2", color="r", face="3")
    with pytest.raises(UnknownNotation):
        Card()


@pytest.mark.parametrize("game,size", [
    ("doudizhu", 54), ("guandan", 108), ("uno", 108), ("gin_rummy", 52), ("leduc", 6), ("limit", 52), ("nolimit", 52),
])
def test_deck_sizes(game, size):
    assert len(build_deck(game)) == size


def test_deck_composition():
    dou = build_deck("doudizhu").counts()
    assert dou["SB"] == dou["HR"] == 1
    assert sum(1 for c in dou if c[1] == "A") == 4
    assert build_deck("leduc").counts() == Counter({"SJ": 1, "HJ": 1, "SQ": 1, "HQ": 1, "SK": 1, "HK": 1})
    assert sorted(c[1] for c in deck_notation("leduc")) == sorted("JJQQKK")
    guan = build_deck("guandan").counts()
    assert set(guan.values()) == {2}
    uno = build_deck("uno").counts()
    faces = Counter()
    for card, n in uno.items():
        faces[card.split("-")[1]] += n
    assert faces["wild"] == 4 and faces["wild_draw_4"] == 4
    assert faces["0"] == 4
    assert all(faces[d] == 8 for d in "123456789")
    assert all(faces[f] == 8 for f in ("skip", "reverse", "draw_2"))


def test_mahjong_has_no_deck():
    with pytest.raises(UnsupportedGame):
        build_deck("mahjong")


@pytest.mark.parametrize("game", [g.value for g in ENGINE_GAMES])
def test_round_trip_every_deck_card(game):
    for card in build_deck(game).cards:
        assert parse_card(format_card(card)) == card


@given(st.sampled_from(sorted(set(deck_notation(GameId.GUANDAN)) | set(deck_notation(GameId.UNO)))))
def test_round_trip_notation(text):
    assert format_card(parse_card(text)) == text


def test_dou_integers():
    assert dou_int("S3") == 3 and dou_int("HA") == 14 and dou_int("D2") == 17
    assert dou_int("SB") == 20 and dou_int("HR") == 30
    ints = dou_deck_ints()
    assert len(ints) == 54
    assert Counter(ints)[17] == 4 and Counter(ints)[20] == 1


def test_gin_notation_round_trip():
    for card in deck_notation("gin_rummy"):
        assert from_gin_notation(gin_notation(card)) == card
    with pytest.raises(UnknownNotation):
        from_gin_notation("1S")
