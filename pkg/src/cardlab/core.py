"""The engine abstraction shared by all games, plus seeding and trajectory records."""

from __future__ import annotations

import hashlib
import json
import random
import struct
from collections import Counter
from dataclasses import dataclass
from typing import Any

from cardlab.cards import GameId, deck_notation, game_id
from cardlab.errors import IllegalAction, NonTerminal, TerminalState, UnsupportedGame

MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *keys) -> int:
    """Split a 64-bit seed into an independent stream keyed by ``keys``.

    The derivation is a BLAKE2b hash, so streams are identical on every
    platform and independent of the order in which matches are scheduled.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<Q", seed & MASK64))
    for k in keys:
        h.update(b"\x00")
        h.update(str(k).encode())
    return struct.unpack("<Q", h.digest())[0]


def make_rng(seed: int, *keys) -> random.Random:
    """MT19937 generator seeded from a derived 64-bit stream id."""
    return random.Random(derive_seed(seed, *keys) if keys else seed & MASK64)


@dataclass
class Observation:
    """What one seat sees. ``fields`` holds the prompt-template slots, JSON-ready."""

    game: str
    seat: int
    role: str
    fields: dict[str, Any]

    def to_json(self) -> dict:
        return {"game": self.game, "seat": self.seat, "role": self.role, **self.fields}


@dataclass
class TrajectoryStep:
    match_id: int
    step: int
    seat: int
    role: str
    observation: Observation
    legal_actions: list
    action: Any
    is_winner: bool = False


class State:
    """Base for per-game mutable states. Engines copy before mutating."""

    game: GameId
    seat: int
    terminal: bool
    history: list

    def copy(self):
        raise NotImplementedError


class Engine:
    """One game's rules. Instances hold only configuration, never match state."""

    game: GameId
    num_players: int
    roles: tuple[str, ...]
    # random-play step bound used by the termination property
    max_steps: int = 1000

    def reset(self, seed: int, **options) -> State:
        raise NotImplementedError

    def legal_actions(self, state) -> list:
        if state.terminal:
            raise TerminalState(f"{self.game.value} state is terminal")
        cached = getattr(state, "_legal", None)
        if cached is None:
            cached = self._legal(state)
            state._legal = cached
        return cached

    def _legal(self, state) -> list:
        raise NotImplementedError

    def step(self, state, action) -> State:
        legal = self.legal_actions(state)
        if action not in legal:
            raise IllegalAction(action, state.seat, self.game.value)
        new = state.copy()
        new._legal = None
        new.history.append((state.seat, action))
        self._apply(new, action)
        return new

    def _apply(self, state, action) -> None:
        raise NotImplementedError

    def replay(self, seed: int, actions, **options) -> State:
        """Rebuild a state from its seed and action sequence without re-validating legality."""
        state = self.reset(seed, **options)
        for action in actions:
            state = state.copy()
            state._legal = None
            state.history.append((state.seat, action))
            self._apply(state, action)
        return state

    def payoffs(self, state) -> list[float]:
        if not state.terminal:
            raise NonTerminal(f"{self.game.value} state is not terminal")
        return list(state.payoffs)

    def current_seat(self, state) -> int:
        return state.seat

    def role(self, state, seat: int) -> str:
        return self.roles[seat]

    def observe(self, state, seat: int | None = None) -> Observation:
        raise NotImplementedError

    def card_zones(self, state) -> Counter:
        """Multiset union of every card zone, for the conservation invariant."""
        raise NotImplementedError

    def full_deck(self) -> Counter:
        return Counter(deck_notation(self.game))

    def winners(self, state) -> set[int]:
        """Seats whose steps count as winning steps. Draws yield no winners."""
        pay = self.payoffs(state)
        return {i for i, p in enumerate(pay) if p > 0}

    def winner_side(self, state) -> str | None:
        w = sorted(self.winners(state))
        return ",".join(self.roles[i] for i in w) or None

    def state_hash(self, state) -> str:
        payload = json.dumps(state_fingerprint(state), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()


def state_fingerprint(state) -> dict:
    return {k: v for k, v in sorted(vars(state).items()) if not k.startswith("_")}


_REGISTRY: dict[GameId, type] = {}


def register(cls):
    _REGISTRY[cls.game] = cls
    return cls


def get_engine(game, **config) -> Engine:
    g = game_id(game)
    # importing the games package populates the registry
    import cardlab.games  # noqa: F401

    if g not in _REGISTRY:
        raise UnsupportedGame(f"no engine for {g.value}")
    return _REGISTRY[g](**config)


def reset(game, seed: int, **options) -> State:
    return get_engine(game).reset(seed, **options)


