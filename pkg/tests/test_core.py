import random

import pytest

from cardlab.cards import ENGINE_GAMES
from cardlab.checks import check_rollouts
from cardlab.core import derive_seed, get_engine, make_rng
from cardlab.errors import IllegalAction, NonTerminal, TerminalState, UnsupportedGame
from conftest import play_out, random_states


def test_derive_seed_is_stable_and_keyed():
    assert derive_seed(7, "match", 3) == derive_seed(7, "match", 3)
    assert derive_seed(7, "match", 3) != derive_seed(7, "match", 4)
    assert derive_seed(7, "match", 3) != derive_seed(8, "match", 3)
    assert 0 <= derive_seed(2**64 - 1, "x") < 2**64
    assert make_rng(1, "a").random() == make_rng(1, "a").random()


def test_unsupported_engine():
    with pytest.raises(UnsupportedGame):
        get_engine("mahjong")
    with pytest.raises(UnsupportedGame):
        get_engine("chess")


def test_reset_examples():
    gin = get_engine("gin_rummy")
    s = gin.reset(5, dealer=0)
    assert len(s.hands[1]) == 11 and len(s.hands[0]) == 10
    uno = get_engine("uno").reset(5)
    assert [len(h) for h in uno.hands] == [7, 7]
    assert len(uno.discard) == 1
    leduc = get_engine("leduc").reset(5)
    assert leduc.pot == 2 and leduc.bets == [1, 1]


def test_terminal_and_illegal_errors(engine_game):
    engine = get_engine(engine_game)
    state = engine.reset(11)
    with pytest.raises(NonTerminal):
        engine.payoffs(state)
    with pytest.raises(IllegalAction) as err:
        engine.step(state, "not-an-action")
    assert err.value.seat == state.seat
    state = play_out(engine, state, random.Random(3))
    with pytest.raises(TerminalState):
        engine.legal_actions(state)


def test_step_does_not_mutate_input(engine_game):
    engine = get_engine(engine_game)
    state = engine.reset(2)
    before = engine.state_hash(state)
    for action in engine.legal_actions(state):
        engine.step(state, action)
    assert engine.state_hash(state) == before


@pytest.mark.parametrize("game", [g.value for g in ENGINE_GAMES])
def test_rollout_properties_small(game):
    report = check_rollouts(game, seed=1, n_games=5)
    assert report.ok, report.failures[:3]
    assert report.games == 5


def test_replay_reproduces_state(engine_game):
    engine = get_engine(engine_game, **({"max_deals": 1} if engine_game == "guandan" else {}))
    seed = 99
    rng = random.Random(0)
    state = engine.reset(seed)
    actions = []
    while not state.terminal:
        legal = engine.legal_actions(state)
        a = legal[rng.randrange(len(legal))]
        actions.append(a)
        state = engine.step(state, a)
    assert engine.state_hash(engine.replay(seed, actions)) == engine.state_hash(state)
    assert engine.state_hash(engine.reset(seed)) == engine.state_hash(engine.reset(seed))


def test_payoff_structure(engine_game):
    config = {"max_deals": 1} if engine_game == "guandan" else {}
    engine = get_engine(engine_game, **config)
    for j in range(10):
        state = play_out(engine, engine.reset(j), random.Random(j))
        pay = engine.payoffs(state)
        assert len(pay) == engine.num_players
        if engine.num_players == 2:
            assert pay[0] == -pay[1]
        else:
            assert engine.winner_side(state) is not None
            assert 0 < len(engine.winners(state)) < engine.num_players


def test_legal_lists_are_deduplicated_and_applicable():
    for game in ("leduc", "uno", "doudizhu"):
        for engine, state in random_states(game, 3):
            legal = engine.legal_actions(state)
            assert legal
            assert len({repr(a) for a in legal}) == len(legal)
            assert engine.legal_actions(state) == legal


def test_observation_hides_opponent_hand():
    engine = get_engine("uno")
    state = engine.reset(4)
    obs = engine.observe(state, 0)
    assert obs.fields["hand"] == state.hands[0]
    assert state.hands[1] != state.hands[0]
    assert "hands" not in obs.fields
