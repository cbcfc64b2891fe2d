import random
from collections import Counter
from itertools import product

from cardlab.agents.rules import dou_rule
from cardlab.cards import dou_deck_ints
from cardlab.core import get_engine
from cardlab.games.doudizhu import classify, compare_dou, dou_legal_moves, enumerate_dou_moves

# Independent oracle: a category table written directly from the combo
# definitions, applied to every sub-multiset of a hand.


def _run(ranks):
    return ranks[-1] <= 14 and ranks == list(range(ranks[0], ranks[0] + len(ranks)))


def oracle_kind(cards):
    """(category, primal, length) or None. A pure trio chain and the highest airplane win ties."""
    n = len(cards)
    cnt = Counter(cards)
    ranks = sorted(cnt)
    shape = sorted(cnt.values())
    if n == 0:
        return None
    if sorted(cards) == [20, 30]:
        return ("Rocket", 30, 1)
    if len(ranks) == 1:
        name = {1: "Solo", 2: "Pair", 3: "Trio", 4: "Bomb"}.get(n)
        return (name, ranks[0], 1) if name else None
    trio = [r for r in ranks if cnt[r] == 3]
    four = [r for r in ranks if cnt[r] == 4]
    if n == 4 and shape == [1, 3]:
        return ("TrioWithSolo", trio[0], 1)
    if n == 5 and shape == [2, 3]:
        return ("TrioWithPair", trio[0], 1)
    if set(shape) == {1} and n >= 5 and _run(ranks):
        return ("SoloChain", ranks[-1], n)
    if set(shape) == {2} and len(ranks) >= 3 and _run(ranks):
        return ("PairChain", ranks[-1], len(ranks))
    if set(shape) == {3} and len(ranks) >= 2 and _run(ranks):
        return ("TrioChain", ranks[-1], len(ranks))
    if n == 6 and four and not (cnt[20] and cnt[30]):
        return ("FourWithDualSolo", four[0], 1)
    if n == 8 and shape == [2, 2, 4]:
        return ("FourWithDualPair", four[0], 1)
    best = None
    for length in range(2, 7):
        for lo in range(3, 15 - length + 1):
            chain = list(range(lo, lo + length))
            if not all(cnt[r] == 3 for r in chain):
                continue
            rest = {r: k for r, k in cnt.items() if r not in chain}
            kicked = sum(rest.values())
            if kicked == length:
                best = ("TrioChainWithSolo", chain[-1], length)
            elif kicked == 2 * length and len(rest) == length and set(rest.values()) == {2}:
                best = ("TrioChainWithPair", chain[-1], length)
    return best


def oracle_beats(a, b):
    if a[0] == "Rocket":
        return b[0] != "Rocket"
    if b[0] == "Rocket":
        return False
    if a[0] == "Bomb":
        return b[0] != "Bomb" or a[1] > b[1]
    if b[0] == "Bomb":
        return False
    return a[0] == b[0] and a[2] == b[2] and a[1] > b[1]


def sub_multisets(hand):
    cnt = sorted(Counter(hand).items())
    for takes in product(*(range(k + 1) for _, k in cnt)):
        cards = tuple(r for (r, _), t in zip(cnt, takes) for _ in range(t))
        if cards:
            yield cards


def oracle_moves(hand, last):
    out = set()
    last_kind = oracle_kind(last) if last else None
    for cards in sub_multisets(hand):
        kind = oracle_kind(cards)
        if kind is None:
            continue
        if last_kind is None or oracle_beats(kind, last_kind):
            out.add(cards)
    if last:
        out.add(())
    return out


def test_rocket_always_available():
    for last in (None, (9, 9, 9, 9), (5,)):
        assert (20, 30) in dou_legal_moves([20, 30], last)


def test_higher_bomb_beats():
    moves = dou_legal_moves([3, 13, 13, 13, 13], (9, 9, 9, 9))
    assert (13, 13, 13, 13) in moves
    assert () in moves


def test_leader_cannot_pass():
    assert () not in dou_legal_moves([3, 4, 5], None)


def test_compare_examples():
    rocket, bomb = classify((20, 30)), classify((3, 3, 3, 3))
    assert compare_dou(rocket, bomb) and not compare_dou(bomb, rocket)
    assert not compare_dou(classify((5, 5)), classify((5, 5)))
    assert compare_dou(bomb, classify((17, 17, 17)))
    assert not compare_dou(classify((4, 5, 6, 7, 8, 9)), classify((3, 4, 5, 6, 7)))


def test_chain_limits():
    assert classify((3, 4, 5, 6, 7)).category == "SoloChain"
    assert classify((3, 4, 5, 6)) is None
    assert classify((10, 11, 12, 13, 14)).category == "SoloChain"
    assert classify((11, 12, 13, 14, 17)) is None
    assert classify((3, 3, 4, 4)) is None
    assert classify((3, 3, 4, 4, 5, 5)).category == "PairChain"
    assert classify((14, 14, 14, 17, 17, 17)) is None
    assert classify((3, 3, 3, 3, 20, 30)) is None


def test_kickers():
    combo = classify((3, 3, 3, 4, 4, 4, 7, 9))
    assert combo.category == "TrioChainWithSolo" and combo.kickers == (7, 9)
    assert classify((3, 3, 3, 3, 5, 6)).kickers == (5, 6)


def test_enumeration_matches_oracle_on_small_hands():
    deck = dou_deck_ints()
    rng = random.Random(20240)
    for _ in range(2000):
        hand = sorted(rng.sample(deck, rng.randint(1, 12)))
        lead = set(dou_legal_moves(hand, None))
        assert lead == oracle_moves(hand, None), hand
        other = sorted(rng.sample(deck, rng.randint(1, 12)))
        last = rng.choice(dou_legal_moves(other, None))
        follow = dou_legal_moves(hand, last)
        assert len(follow) == len(set(follow))
        assert set(follow) == oracle_moves(hand, last), (hand, last)


def test_classify_agrees_with_oracle_table():
    deck = dou_deck_ints()
    rng = random.Random(7)
    for _ in range(300):
        hand = sorted(rng.sample(deck, 10))
        for cards in sub_multisets(hand):
            combo = classify(cards)
            kind = oracle_kind(cards)
            assert (combo is None) == (kind is None), cards
            if combo:
                assert (combo.category, combo.primal, combo.length) == kind


def test_compare_agrees_with_oracle_on_pairs():
    rng = random.Random(3)
    deck = dou_deck_ints()
    hand = sorted(rng.sample(deck, 20))
    combos = enumerate_dou_moves(hand)
    for a in combos:
        for b in combos:
            ka = (a.category, a.primal, a.length)
            kb = (b.category, b.primal, b.length)
            assert compare_dou(a, b) == oracle_beats(ka, kb)


def test_every_follow_move_beats_last():
    rng = random.Random(5)
    deck = dou_deck_ints()
    for _ in range(200):
        hand = sorted(rng.sample(deck, 17))
        last = rng.choice(dou_legal_moves(sorted(rng.sample(deck, 17)), None))
        for move in enumerate_dou_moves(hand, last):
            if move.cards:
                assert compare_dou(move, classify(last))


def test_trick_flow_and_landlord_win():
    engine = get_engine("doudizhu")
    deal = ([3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 17, 17, 20, 30, 3, 4, 5, 6],
            [3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 7, 8, 8, 8, 9, 9, 9],
            [10, 10, 10, 11, 11, 11, 12, 12, 12, 13, 13, 13, 14, 14, 14, 17, 17])
    state = engine.reset(0, deal=deal)
    assert state.seat == 0 and len(state.hands[0]) == 20
    state = engine.step(state, (3,))
    state = engine.step(state, (5,))
    state = engine.step(state, ())
    state = engine.step(state, ())
    # two passes close the trick; the farmer who played last leads
    assert state.seat == 1 and state.last_move is None
    assert () not in engine.legal_actions(state)


def test_landlord_emptying_hand_wins():
    engine = get_engine("doudizhu")
    rng = random.Random(1)
    for seed in range(30):
        state = engine.reset(seed)
        while not state.terminal:
            legal = engine.legal_actions(state)
            state = engine.step(state, legal[rng.randrange(len(legal))])
        winner = state.history[-1][0]
        assert not state.hands[winner]
        assert engine.winner_side(state) == ("landlord" if winner == 0 else "farmer")
        assert engine.payoffs(state) == ([1.0, -0.5, -0.5] if winner == 0 else [-1.0, 0.5, 0.5])


def test_rule_follower_plays_minimal_beating_combo():
    legal = dou_legal_moves([4, 6, 9, 9, 13], (5,))
    obs = {"role": "landlord", "history": [["landlord_up", [5]]]}
    assert dou_rule(obs, legal) == (6,)
    assert dou_rule(obs, dou_legal_moves([3, 4], (5,))) == ()
    # a farmer does not overtake the other farmer
    obs = {"role": "landlord_down", "history": [["landlord_up", [5]], ["landlord", []]]}
    assert dou_rule(obs, legal) == ()


def test_rule_leader_sheds_longest_combo():
    legal = dou_legal_moves([3, 4, 5, 6, 7, 9, 9, 13], None)
    assert dou_rule({"role": "landlord", "history": []}, legal) == (3, 4, 5, 6, 7)
