"""Seat policies and the ``kind:arg`` binding syntax that names them."""

from __future__ import annotations

from cardlab.agents.base import Policy, RandomPolicy, random_policy
from cardlab.agents.rules import RulePolicy, rule_policy
from cardlab.cards import game_id
from cardlab.errors import PolicyUnavailable, UnsupportedGame

__all__ = ["Policy", "RandomPolicy", "RulePolicy", "random_policy", "rule_policy", "resolve_policy"]


def resolve_policy(binding: str, game) -> Policy:
    """Turn ``random``, ``rule``, ``dqn:path``, ``http:url`` or ``stdio:cmd`` into a policy."""
    if isinstance(binding, Policy):
        return binding
    kind, _, arg = str(binding).partition(":")
    try:
        if kind == "random":
            return RandomPolicy()
        if kind == "rule":
            return RulePolicy(game)
        if kind == "dqn":
            from cardlab.agents.dqn import DQNPolicy

            policy = DQNPolicy.load(arg)
            if policy.game != game_id(game):
                raise PolicyUnavailable(f"model {arg} was trained for {policy.game.value}")
            return policy
        if kind in ("http", "https", "stdio"):
            from cardlab.harness.endpoints import PolicyEndpoint, RemotePolicy

            if kind == "stdio":
                endpoint = PolicyEndpoint("stdio", arg)
            else:
                # accept both http:host:port/path and full http://... URLs
                endpoint = PolicyEndpoint("http", binding if arg.startswith("//") else arg)
            return RemotePolicy(endpoint, game)
    except (OSError, ValueError) as exc:
        if isinstance(exc, UnsupportedGame):
            raise
        raise PolicyUnavailable(f"cannot load policy {binding!r}: {exc}") from exc
    raise PolicyUnavailable(f"unknown policy binding {binding!r}")
