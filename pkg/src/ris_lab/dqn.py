"""Small numpy DQN: fully connected Q-network, Adam, replay buffer, epsilon-greedy, target network."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"RISQ"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class AgentConfig:
    gamma: float = 0.98
    learning_rate: float = 0.01
    batch_size: int = 128
    target_update_interval: int = 100
    hidden: tuple[int, ...] = (200, 100, 40)
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_fraction: float = 0.8
    replay_capacity: int = 10_000
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    episodes: int = 2000
    plateau_patience: int | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        if self.batch_size < 1 or self.replay_capacity < self.batch_size:
            raise ValueError("need 1 <= batch_size <= replay_capacity")
        for e in (self.epsilon_start, self.epsilon_end):
            if not 0.0 <= e <= 1.0:
                raise ValueError("epsilon endpoints must lie in [0, 1]")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))

    def epsilon(self, episode: int, episodes: int) -> float:
        """Linear decay over the first ``epsilon_decay_fraction`` of the run, then flat."""
        span = self.epsilon_decay_fraction * episodes
        if span <= 0:
            return self.epsilon_end
        frac = min(1.0, episode / span)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)


class Mlp:
    """ReLU hidden layers, linear output. ``weights[i]`` has shape (fan_in, fan_out)."""

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        if len(weights) != len(biases) or not weights:
            raise ValueError("need matching, non-empty weight and bias lists")
        for w, b in zip(weights, biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError("bias length must equal layer fan_out")
        for w0, w1 in zip(weights, weights[1:]):
            if w0.shape[1] != w1.shape[0]:
                raise ValueError("layer sizes do not chain")
        self.weights = [np.array(w, dtype=float) for w in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]

    @classmethod
    def initialize(cls, sizes, rng: np.random.Generator) -> Mlp:
        """Glorot-uniform weights, zero biases."""
        ws, bs = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            ws.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            bs.append(np.zeros(fan_out))
        return cls(ws, bs)

    @classmethod
    def zeros(cls, sizes) -> Mlp:
        return cls([np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])],
                   [np.zeros(b) for b in sizes[1:]])

    @property
    def sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def action_count(self) -> int:
        return self.weights[-1].shape[1]

    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def copy(self) -> Mlp:
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def copy_from(self, other: Mlp) -> None:
        for dst, src in zip(self.params(), other.params()):
            dst[...] = src

    def forward(self, states: np.ndarray) -> np.ndarray:
        return self._forward(states)[-1]

    def _forward(self, states: np.ndarray) -> list[np.ndarray]:
        x = np.asarray(states, dtype=float)
        if x.shape[-1] != self.input_dim:
            raise ValueError(f"state length {x.shape[-1]} != network input {self.input_dim}")
        acts = [x]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = acts[-1] @ w + b
            acts.append(z if i == last else np.maximum(z, 0.0))
        return acts

    def loss_and_grads(self, states, actions, targets) -> tuple[float, list[np.ndarray]]:
        """MSE between Q(s, a) and ``targets``; gradients in ``params()`` order."""
        acts = self._forward(states)
        q = acts[-1]
        n = q.shape[0]
        rows = np.arange(n)
        err = q[rows, actions] - targets
        loss = float(np.mean(err ** 2))
        delta = np.zeros_like(q)
        delta[rows, actions] = 2.0 * err / n
        grads: list[np.ndarray] = []
        for i in range(len(self.weights) - 1, -1, -1):
            grads.append(delta.sum(axis=0))
            grads.append(acts[i].T @ delta)
            if i:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0)
        grads.reverse()
        return loss, grads


def forward(net: Mlp, state) -> np.ndarray:
    return net.forward(np.asarray(state, dtype=float))


class Adam:
    def __init__(self, net: Mlp, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in net.params()]
        self.v = [np.zeros_like(p) for p in net.params()]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class ReplayBuffer:
    """Fixed-capacity FIFO of (state, action, reward, next_state, done) transitions."""

    def __init__(self, capacity: int, state_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.dones = np.zeros(capacity, dtype=bool)
        self._next = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def push(self, state, action: int, reward: float, next_state, done: bool) -> None:
        i = self._next
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.dones[i] = done
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def order(self) -> np.ndarray:
        """Slot indices from oldest to newest."""
        start = self._next if self.size == self.capacity else 0
        return (start + np.arange(self.size)) % self.capacity

    def entries(self) -> list[tuple]:
        return [(self.states[i].copy(), int(self.actions[i]), float(self.rewards[i]),
                 self.next_states[i].copy(), bool(self.dones[i])) for i in self.order()]

    def sample(self, batch_size: int, rng: np.random.Generator):
        if batch_size > self.size:
            raise ValueError(f"cannot sample {batch_size} from {self.size} transitions")
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return (self.states[idx], self.actions[idx], self.rewards[idx],
                self.next_states[idx], self.dones[idx])


def td_targets(target_net: Mlp, rewards, next_states, dones, gamma: float) -> np.ndarray:
    bootstrap = target_net.forward(next_states).max(axis=1)
    return np.where(dones, rewards, rewards + gamma * bootstrap)


def train_step(net: Mlp, target_net: Mlp, batch, cfg: AgentConfig, optimizer: Adam) -> float:
    """One Adam update of ``net`` on a TD batch; returns the pre-update loss."""
    states, actions, rewards, next_states, dones = batch
    if len(actions) == 0:
        raise ValueError("empty batch")
    y = td_targets(target_net, np.asarray(rewards, float), next_states, np.asarray(dones, bool), cfg.gamma)
    loss, grads = net.loss_and_grads(states, np.asarray(actions), y)
    optimizer.step(net.params(), grads)
    return loss


def select_action(net: Mlp, state, epsilon: float, rng: np.random.Generator) -> int:
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(net.action_count))
    return int(np.argmax(forward(net, state)))


def sync_target(net: Mlp, target_net: Mlp) -> None:
    target_net.copy_from(net)


class Agent:
    """Online/target networks, optimizer and replay memory driven by one writer."""

    def __init__(self, state_dim: int, action_count: int, cfg: AgentConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.net = Mlp.initialize([state_dim, *cfg.hidden, action_count], rng)
        self.target = self.net.copy()
        self.optimizer = Adam(self.net, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        self.buffer = ReplayBuffer(cfg.replay_capacity, state_dim)
        self.grad_steps = 0

    def act(self, state, epsilon: float) -> int:
        return select_action(self.net, state, epsilon, self.rng)

    def observe(self, state, action, reward, next_state, done) -> float | None:
        """Store a transition and, once the buffer holds a batch, take one gradient step."""
        self.buffer.push(state, action, reward, next_state, done)
        if len(self.buffer) < self.cfg.batch_size:
            return None
        loss = train_step(self.net, self.target, self.buffer.sample(self.cfg.batch_size, self.rng),
                          self.cfg, self.optimizer)
        self.grad_steps += 1
        if self.grad_steps % self.cfg.target_update_interval == 0:
            sync_target(self.net, self.target)
        return loss


def _write_tensors(fh, weights, biases) -> None:
    for w, b in zip(weights, biases):
        rows, cols = w.shape
        fh.write(struct.pack("<II", rows, cols))
        fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def _read_tensors(buf: memoryview, offset: int, layers: int):
    ws, bs = [], []
    for _ in range(layers):
        rows, cols = struct.unpack_from("<II", buf, offset)
        offset += 8
        w = np.frombuffer(buf, dtype="<f8", count=rows * cols, offset=offset).reshape(rows, cols)
        offset += 8 * rows * cols
        b = np.frombuffer(buf, dtype="<f8", count=cols, offset=offset)
        offset += 8 * cols
        ws.append(w.astype(float))
        bs.append(b.astype(float))
    return ws, bs, offset


def save_checkpoint(path, net: Mlp, optimizer: Adam | None = None) -> None:
    """Binary little-endian dump: magic, version, layers, weights+biases, Adam m, Adam v, step."""
    if optimizer is None:
        optimizer = Adam(net, 0.0)
    layers = len(net.weights)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_VERSION, layers))
        _write_tensors(fh, net.weights, net.biases)
        _write_tensors(fh, optimizer.m[0::2], optimizer.m[1::2])
        _write_tensors(fh, optimizer.v[0::2], optimizer.v[1::2])
        fh.write(struct.pack("<Q", optimizer.t))


def load_checkpoint(path, lr: float = 0.01) -> tuple[Mlp, Adam]:
    data = memoryview(Path(path).read_bytes())
    if bytes(data[:4]) != MAGIC:
        raise ValueError(f"{path}: not a checkpoint (bad magic)")
    version, layers = struct.unpack_from("<II", data, 4)
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    offset = 12
    ws, bs, offset = _read_tensors(data, offset, layers)
    mw, mb, offset = _read_tensors(data, offset, layers)
    vw, vb, offset = _read_tensors(data, offset, layers)
    (step,) = struct.unpack_from("<Q", data, offset)
    if offset + 8 != len(data):
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    net = Mlp(ws, bs)
    opt = Adam(net, lr)
    opt.m = [p for pair in zip(mw, mb) for p in pair]
    opt.v = [p for pair in zip(vw, vb) for p in pair]
    opt.t = int(step)
    return net, opt
