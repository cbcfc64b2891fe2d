"""A small deep Q-network trained against a fixed opponent, in plain numpy.

The network is a ReLU MLP with hand-written backpropagation. Training uses
uniform experience replay, a periodically synced target network, linear
epsilon decay and plain SGD on the squared TD error. Illegal actions are
masked to -inf both when acting and when forming bootstrap targets.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from cardlab.agents.base import Policy, RandomPolicy
from cardlab.agents.features import FEATURE_WIDTH, action_space, encode_features, legal_mask
from cardlab.cards import game_id
from cardlab.core import derive_seed, get_engine
from cardlab.errors import DivergenceDetected, SchemaMismatch, UnsupportedGame


@dataclass
class DQNConfig:
    hidden: tuple[int, ...] = (64, 64)
    gamma: float = 0.99
    batch_size: int = 32
    replay_capacity: int = 20_000
    warmup: int = 1_000
    eps_start: float = 1.0
    eps_end: float = 0.1
    eps_decay_steps: int = 20_000
    target_sync: int = 1_000
    lr: float = 5e-4
    train_steps: int = 200_000
    train_every: int = 1

    def epsilon(self, step: int) -> float:
        frac = min(1.0, step / max(1, self.eps_decay_steps))
        return self.eps_start + frac * (self.eps_end - self.eps_start)


class QNetwork:
    def __init__(self, layers, seed: int = 0):
        self.layers = [int(n) for n in layers]
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for n_in, n_out in zip(self.layers, self.layers[1:]):
            bound = math.sqrt(6.0 / n_in)
            self.weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)))
            self.biases.append(np.zeros(n_out))

    def forward(self, x: np.ndarray, keep: bool = False):
        """Q-values for a batch (or single row). With ``keep``, also return layer inputs."""
        acts = [x]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
            acts.append(h)
        return (h, acts) if keep else h

    def backward(self, acts, grad_out: np.ndarray):
        """Parameter gradients given dLoss/dOutput, as (weight grads, bias grads)."""
        gw = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        g = grad_out
        for i in range(len(self.weights) - 1, -1, -1):
            gw[i] = acts[i].T @ g
            gb[i] = g.sum(axis=0)
            if i:
                g = (g @ self.weights[i].T) * (acts[i] > 0)
        return gw, gb

    def copy(self) -> "QNetwork":
        other = QNetwork.__new__(QNetwork)
        other.layers = list(self.layers)
        other.weights = [w.copy() for w in self.weights]
        other.biases = [b.copy() for b in self.biases]
        return other

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def to_json(self) -> list:
        return [{"W": w.tolist(), "b": b.tolist()} for w, b in zip(self.weights, self.biases)]

    @classmethod
    def from_json(cls, layers, weights) -> "QNetwork":
        net = cls.__new__(cls)
        net.layers = [int(n) for n in layers]
        net.weights = [np.asarray(p["W"], dtype=np.float64) for p in weights]
        net.biases = [np.asarray(p["b"], dtype=np.float64) for p in weights]
        for i, (w, b) in enumerate(zip(net.weights, net.biases)):
            if w.shape != (net.layers[i], net.layers[i + 1]) or b.shape != (net.layers[i + 1],):
                raise SchemaMismatch(f"layer {i} has shape {w.shape}, expected {net.layers[i:i + 2]}")
        return net


def masked_max(q: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Row-wise max over legal entries; rows with no legal entry give 0."""
    masked = np.where(mask, q, -np.inf)
    best = masked.max(axis=1)
    return np.where(mask.any(axis=1), best, 0.0)


def td_targets(target_net: QNetwork, rewards, next_x, dones, next_masks, gamma: float) -> np.ndarray:
    boot = masked_max(target_net.forward(next_x), next_masks)
    return rewards + gamma * (1.0 - dones) * boot


def td_loss_and_grads(net: QNetwork, x, actions, targets):
    """Loss 0.5 * mean((Q(x, a) - y)^2) and its gradients w.r.t. ``net``'s parameters."""
    q, acts = net.forward(x, keep=True)
    idx = np.arange(len(actions))
    err = q[idx, actions] - targets
    # a diverging run surfaces as a non-finite loss, checked by the caller
    with np.errstate(over="ignore", invalid="ignore"):
        loss = 0.5 * float(np.mean(err ** 2))
    grad_out = np.zeros_like(q)
    grad_out[idx, actions] = err / len(actions)
    gw, gb = net.backward(acts, grad_out)
    return loss, gw, gb


class ReplayBuffer:
    def __init__(self, capacity: int, width: int, n_actions: int):
        self.capacity = capacity
        self.x = np.zeros((capacity, width))
        self.a = np.zeros(capacity, dtype=np.int64)
        self.r = np.zeros(capacity)
        self.nx = np.zeros((capacity, width))
        self.done = np.zeros(capacity)
        self.nmask = np.zeros((capacity, n_actions), dtype=bool)
        self.size = 0
        self._next = 0

    def __len__(self):
        return self.size

    def add(self, x, a, r, nx, done, nmask) -> None:
        i = self._next
        self.x[i], self.a[i], self.r[i] = x, a, r
        self.nx[i], self.done[i], self.nmask[i] = nx, float(done), nmask
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch: int, rng: np.random.Generator):
        idx = rng.integers(0, self.size, size=batch)
        return self.x[idx], self.a[idx], self.r[idx], self.nx[idx], self.done[idx], self.nmask[idx]


class DQNPolicy(Policy):
    name = "dqn"

    def __init__(self, game, net: QNetwork, config: DQNConfig | None = None):
        self.game = game_id(game)
        self.net = net
        self.config = config or DQNConfig()
        self.actions = action_space(self.game)
        self.history: list[dict] = []

    def q_values(self, obs) -> np.ndarray:
        return self.net.forward(encode_features(self.game, obs))

    def act(self, obs, legal, rng=None):
        q = self.q_values(obs)
        mask = legal_mask(self.game, legal)
        return self.actions[int(np.argmax(np.where(mask, q, -np.inf)))]

    def to_json(self) -> dict:
        cfg = asdict(self.config)
        cfg["hidden"] = list(cfg["hidden"])
        return {"game": self.game.value, "layers": self.net.layers, "weights": self.net.to_json(), "config": cfg}

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def from_json(cls, doc: dict) -> "DQNPolicy":
        try:
            game = game_id(doc["game"])
            net = QNetwork.from_json(doc["layers"], doc["weights"])
        except KeyError as exc:
            raise SchemaMismatch(f"model document lacks {exc}") from None
        cfg = dict(doc.get("config", {}))
        if "hidden" in cfg:
            cfg["hidden"] = tuple(cfg["hidden"])
        if net.layers[0] != FEATURE_WIDTH[game] or net.layers[-1] != len(action_space(game)):
            raise SchemaMismatch(f"layer sizes {net.layers} do not fit {game.value}")
        return cls(game, net, DQNConfig(**cfg))

    @classmethod
    def load(cls, path) -> "DQNPolicy":
        return cls.from_json(json.loads(Path(path).read_text()))


def train_dqn(game, config: DQNConfig | None = None, seed: int = 0, opponent: Policy | None = None,
              log_every: int = 0, log=print, on_step=None) -> DQNPolicy:
    """Train a DQN seat against ``opponent`` (random by default) for ``config.train_steps`` learner steps.

    ``on_step(step, online, target)`` is called after every learner step.
    """
    g = game_id(game)
    if g not in FEATURE_WIDTH:
        raise UnsupportedGame(f"DQN training supports poker games only, not {g.value}")
    cfg = config or DQNConfig()
    engine = get_engine(g)
    space = action_space(g)
    width = FEATURE_WIDTH[g]
    net = QNetwork([width, *cfg.hidden, len(space)], seed=derive_seed(seed, "init"))
    target = net.copy()
    buf = ReplayBuffer(cfg.replay_capacity, width, len(space))
    nrng = np.random.default_rng(derive_seed(seed, "replay"))
    explore = random.Random(derive_seed(seed, "explore"))
    opp = opponent or RandomPolicy()
    opp_rng = random.Random(derive_seed(seed, "opponent"))
    policy = DQNPolicy(g, net, cfg)
    zeros_x = np.zeros(width)
    zeros_m = np.zeros(len(space), dtype=bool)

    steps = 0
    hand = 0
    recent_loss = []
    recent_pay = []
    while steps < cfg.train_steps:
        learner = (hand // 2) % 2
        state = engine.reset(derive_seed(seed, "hand", hand), dealer=hand % 2)
        hand += 1
        pending = None
        while not state.terminal:
            legal = engine.legal_actions(state)
            if state.seat != learner:
                state = engine.step(state, opp.act(engine.observe(state), legal, opp_rng))
                continue
            x = encode_features(g, engine.observe(state))
            mask = legal_mask(g, legal)
            if pending is not None:
                buf.add(*pending, 0.0, x, False, mask)
            if explore.random() < cfg.epsilon(steps):
                action = legal[explore.randrange(len(legal))]
            else:
                q = net.forward(x)
                action = space[int(np.argmax(np.where(mask, q, -np.inf)))]
            pending = (x, space.index(action))
            state = engine.step(state, action)
            steps += 1
            if len(buf) >= cfg.warmup and steps % cfg.train_every == 0:
                bx, ba, br, bnx, bd, bm = buf.sample(cfg.batch_size, nrng)
                y = td_targets(target, br, bnx, bd, bm, cfg.gamma)
                loss, gw, gb = td_loss_and_grads(net, bx, ba, y)
                if not math.isfinite(loss):
                    raise DivergenceDetected(f"TD loss became {loss} at step {steps}")
                for w, d in zip(net.weights, gw):
                    w -= cfg.lr * d
                for b, d in zip(net.biases, gb):
                    b -= cfg.lr * d
                recent_loss.append(loss)
            if steps % cfg.target_sync == 0:
                target = net.copy()
            if on_step is not None:
                on_step(steps, net, target)
            if log_every and steps % log_every == 0:
                entry = {
                    "step": steps,
                    "epsilon": round(cfg.epsilon(steps), 4),
                    "loss": float(np.mean(recent_loss)) if recent_loss else None,
                    "train_reward": float(np.mean(recent_pay)) if recent_pay else None,
                }
                policy.history.append(entry)
                log(json.dumps(entry))
                recent_loss.clear()
                recent_pay.clear()
            if steps >= cfg.train_steps:
                break
        if state.terminal:
            payoff = engine.payoffs(state)[learner]
            recent_pay.append(payoff)
            if pending is not None:
                buf.add(*pending, payoff, zeros_x, True, zeros_m)
    return policy
