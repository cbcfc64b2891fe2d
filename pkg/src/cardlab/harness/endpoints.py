"""External policies behind a JSON wire protocol.

A request is ``{"game", "seat", "match_id", "step", "prompt", "observation",
"legal_actions"}`` and the reply is ``{"action": ...}``. HTTP endpoints take
the request as a POST body; stdio endpoints are child processes that read one
request per line and write one reply per line.
"""

from __future__ import annotations

import json
import queue
import random
import shlex
import subprocess
import threading
from dataclasses import dataclass

import httpx

from cardlab.agents.base import Policy
from cardlab.cards import game_id
from cardlab.core import Observation, derive_seed
from cardlab.errors import CardLabError, Timeout, TransportError
from cardlab.prompts.codec import action_value, decode_action
from cardlab.prompts.render import render

TRANSPORTS = ("in-process", "stdio", "http")


@dataclass
class PolicyEndpoint:
    transport: str
    address: object
    timeout: float = 30.0
    retries: int = 2

    def __post_init__(self):
        if self.transport not in TRANSPORTS:
            raise ValueError(f"unknown transport {self.transport!r}")
        if self.retries < 0:
            raise ValueError("retry limit must be non-negative")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.transport == "http" and not str(self.address).startswith(("http://", "https://")):
            self.address = "http://" + str(self.address)


class _Client:
    def send(self, request: dict) -> str:
        raise NotImplementedError

    def close(self) -> None:
        pass


class _HttpClient(_Client):
    def __init__(self, url: str, timeout: float):
        self.url = url
        self.client = httpx.Client(timeout=timeout)

    def send(self, request: dict) -> str:
        try:
            resp = self.client.post(self.url, json=request)
        except httpx.TimeoutException as exc:
            raise Timeout(f"{self.url}: {exc}") from exc
        except httpx.HTTPError as exc:
            raise TransportError(f"{self.url}: {exc}") from exc
        if resp.status_code >= 500:
            raise TransportError(f"{self.url}: HTTP {resp.status_code}")
        return resp.text

    def close(self) -> None:
        self.client.close()


class _StdioClient(_Client):
    def __init__(self, command, timeout: float):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1, encoding="utf-8"
            )
        except OSError as exc:
            raise TransportError(f"cannot start {argv!r}: {exc}") from exc
        self.lines: queue.Queue = queue.Queue()
        threading.Thread(target=self._pump, daemon=True).start()
        self.lock = threading.Lock()

    def _pump(self):
        for line in self.proc.stdout:
            self.lines.put(line)
        self.lines.put(None)

    def send(self, request: dict) -> str:
        with self.lock:
            try:
                self.proc.stdin.write(json.dumps(request) + "\n")
                self.proc.stdin.flush()
            except (BrokenPipeError, ValueError, OSError) as exc:
                raise TransportError(f"stdio policy closed its input: {exc}") from exc
            try:
                line = self.lines.get(timeout=self.timeout)
            except queue.Empty:
                raise Timeout(f"no reply within {self.timeout}s") from None
            if line is None:
                raise TransportError("stdio policy exited")
            return line

    def close(self) -> None:
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()


class _InProcessClient(_Client):
    """Calls a local policy through the full JSON round trip, for protocol tests."""

    def __init__(self, policy: Policy):
        self.policy = policy

    def send(self, request: dict) -> str:
        return json.dumps(answer(self.policy, request))


def open_client(endpoint: PolicyEndpoint) -> _Client:
    if endpoint.transport == "http":
        return _HttpClient(str(endpoint.address), endpoint.timeout)
    if endpoint.transport == "stdio":
        return _StdioClient(endpoint.address, endpoint.timeout)
    return _InProcessClient(endpoint.address)


def answer(policy: Policy, request: dict) -> dict:
    """Serve one request with a local policy (the server side of the protocol)."""
    from cardlab.prompts.codec import action_from_value

    game = game_id(request["game"])
    obs_fields = request["observation"]
    obs = Observation(game.value, request["seat"], obs_fields.get("role", ""), obs_fields)
    legal = [action_from_value(game, v) for v in request["legal_actions"]]
    rng = random.Random(derive_seed(0, request.get("match_id", 0), request.get("step", 0), request["seat"]))
    return {"action": action_value(game, policy.act(obs, legal, rng))}


def build_request(game, obs: Observation, legal, match_id: int = 0, step: int = 0) -> dict:
    g = game_id(game)
    fields = dict(obs.fields)
    fields.setdefault("role", obs.role)
    return {
        "game": g.value,
        "seat": obs.seat,
        "match_id": match_id,
        "step": step,
        "prompt": render(g, obs),
        "observation": fields,
        "legal_actions": [action_value(g, a) for a in legal],
    }


@dataclass
class RemoteOutcome:
    action: object
    retries: int
    fallback: bool


def act_remote(endpoint: PolicyEndpoint, request: dict, client: _Client | None = None,
               rng: random.Random | None = None) -> RemoteOutcome:
    """Ask an endpoint for an action, retrying bad replies, then falling back to a random legal one.

    Transport failures (``Timeout``, ``TransportError``) propagate.
    """
    from cardlab.prompts.codec import action_from_value

    game = game_id(request["game"])
    legal = [action_from_value(game, v) for v in request["legal_actions"]]
    own = client is None
    client = client or open_client(endpoint)
    try:
        for attempt in range(endpoint.retries + 1):
            text = client.send(request)
            try:
                action = decode_action(game, text)
            except CardLabError:
                continue
            if action in legal:
                return RemoteOutcome(action, attempt, False)
    finally:
        if own:
            client.close()
    rng = rng or random.Random(derive_seed(0, request.get("match_id", 0), request.get("step", 0)))
    return RemoteOutcome(legal[rng.randrange(len(legal))], endpoint.retries, True)


class RemotePolicy(Policy):
    """A seat filled by an endpoint; counts retries and random fallbacks."""

    name = "remote"

    def __init__(self, endpoint: PolicyEndpoint, game):
        self.endpoint = endpoint
        self.game = game_id(game)
        self.client = open_client(endpoint)
        self.retries = 0
        self.fallbacks = 0
        self.calls = 0
        self.match_id = 0

    def act(self, obs, legal, rng=None):
        request = build_request(self.game, obs, legal, match_id=self.match_id, step=self.calls)
        out = act_remote(self.endpoint, request, client=self.client, rng=rng)
        self.calls += 1
        self.retries += out.retries
        self.fallbacks += int(out.fallback)
        return out.action

    def close(self) -> None:
        self.client.close()
