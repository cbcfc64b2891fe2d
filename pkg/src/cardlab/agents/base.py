"""Seat policies share one call shape: (observation, legal actions, rng) -> action."""

from __future__ import annotations

import random

from cardlab.core import Observation


class Policy:
    name = "policy"

    def act(self, obs: Observation, legal: list, rng: random.Random):
        raise NotImplementedError

    def __call__(self, obs, legal, rng):
        return self.act(obs, legal, rng)


class RandomPolicy(Policy):
    name = "random"

    def act(self, obs, legal, rng):
        return legal[rng.randrange(len(legal))]


def random_policy(obs, legal, rng):
    return legal[rng.randrange(len(legal))]
