import pytest

from cardlab.cards import ENGINE_GAMES
from cardlab.core import derive_seed, get_engine, make_rng


def random_states(game, n_games, seed=0, **engine_config):
    """Yield (engine, state) for every decision point of seeded random-play games."""
    engine = get_engine(game, **engine_config)
    for j in range(n_games):
        rng = make_rng(seed, "fuzz", j)
        state = engine.reset(derive_seed(seed, "fuzz-deal", j))
        while not state.terminal:
            yield engine, state
            legal = engine.legal_actions(state)
            state = engine.step(state, legal[rng.randrange(len(legal))])


def play_out(engine, state, rng):
    while not state.terminal:
        legal = engine.legal_actions(state)
        state = engine.step(state, legal[rng.randrange(len(legal))])
    return state


@pytest.fixture(params=[g.value for g in ENGINE_GAMES])
def engine_game(request):
    return request.param


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
