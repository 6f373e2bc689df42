"""Tabular Q-learning: epsilon-greedy control with one-step TD updates.

The update is the classic

    Q[s][a] += alpha * (r + gamma * max_a' Q[s'][a'] - Q[s][a])

with terminating transitions bootstrapping zero, so terminal-state rows
stay pinned at 0. Exploration decays linearly, everything is driven by
per-episode sub-streams of one seed, and training returns the complete
set of episode traces for metrics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .envcore import Environment, RngStream
from .errors import ConfigError, DimensionMismatch, NonFinite, ParseError, SchemaError

# leading sub-stream keys keep training and evaluation randomness disjoint
TRAIN_STREAM = 0
EVAL_STREAM = 1


@dataclass
class QTable:
    """State x action matrix of action-value estimates, zero-initialized."""

    n_states: int
    n_actions: int
    values: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.values is None:
            self.values = np.zeros((self.n_states, self.n_actions))
        else:
            self.values = np.asarray(self.values, dtype=float)
            if self.values.shape != (self.n_states, self.n_actions):
                raise DimensionMismatch(
                    f"values shape {self.values.shape} != "
                    f"({self.n_states}, {self.n_actions})"
                )

    def copy(self) -> "QTable":
        return QTable(self.n_states, self.n_actions, self.values.copy())


@dataclass(frozen=True)
class LearnerConfig:
    """Training hyperparameters; all surfaced, all validated.

    epsilon decays linearly from epsilon_start to epsilon_end over
    epsilon_decay_episodes (default: the first half of training), then
    holds.
    """

    alpha: float = 0.1
    gamma: float = 0.99
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_episodes: int | None = None
    episodes: int = 5000
    max_steps_per_episode: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if not (0.0 <= self.gamma < 1.0):
            raise ConfigError(f"gamma must be in [0, 1), got {self.gamma}")
        for name in ("epsilon_start", "epsilon_end"):
            eps = getattr(self, name)
            if not (0.0 <= eps <= 1.0):
                raise ConfigError(f"{name} must be in [0, 1], got {eps}")
        if self.epsilon_end > self.epsilon_start:
            raise ConfigError("epsilon_end must not exceed epsilon_start")
        if self.episodes < 1:
            raise ConfigError(f"episodes must be >= 1, got {self.episodes}")
        if self.max_steps_per_episode < 1:
            raise ConfigError("max_steps_per_episode must be >= 1")
        if self.epsilon_decay_episodes is not None and self.epsilon_decay_episodes < 1:
            raise ConfigError("epsilon_decay_episodes must be >= 1")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")

    def decay_episodes(self) -> int:
        if self.epsilon_decay_episodes is not None:
            return self.epsilon_decay_episodes
        return max(1, self.episodes // 2)


def epsilon_schedule(config: LearnerConfig, episode: int) -> float:
    """Exploration rate for a 0-based episode index."""
    span = config.decay_episodes()
    frac = min(1.0, episode / span)
    return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac


@dataclass(frozen=True)
class TraceStep:
    state: int
    action: int
    reward: float
    next_state: int
    done: bool


@dataclass
class EpisodeTrace:
    """One episode's steps plus running reward bookkeeping."""

    steps: list[TraceStep]
    cumulative: list[float]
    total_reward: float
    truncated: bool


def act(q: QTable, state: int, epsilon: float, rng: RngStream) -> int:
    """Epsilon-greedy: explore uniformly with probability epsilon, else
    take the lowest-index argmax of the state's Q row."""
    if epsilon > 0.0 and rng.random() < epsilon:
        return rng.integers(q.n_actions)
    return int(np.argmax(q.values[state]))


def q_update(q: QTable, s: int, a: int, r: float, s_next: int, done: bool,
             alpha: float, gamma: float) -> float:
    """Apply one TD update in place; returns the new value at (s, a)."""
    old = float(q.values[s, a])
    target = r if done else r + gamma * float(np.max(q.values[s_next]))
    new = old + alpha * (target - old)
    if not math.isfinite(new):
        raise NonFinite(f"update at ({s}, {a}) produced {new}")
    q.values[s, a] = new
    return new


def greedy_policy(q: QTable) -> np.ndarray:
    """Per-state lowest-index argmax action."""
    return np.argmax(q.values, axis=1)


def run_episode(env: Environment, q: QTable, config: LearnerConfig,
                epsilon: float, rng: RngStream, learning: bool) -> EpisodeTrace:
    """Roll one episode: act, step, (optionally) update, until done or
    the step cap. With learning=False the Q-table is left untouched."""
    state = env.reset(rng)
    steps: list[TraceStep] = []
    cumulative: list[float] = []
    total = 0.0
    done = False
    for _ in range(config.max_steps_per_episode):
        action = act(q, state, epsilon, rng)
        outcome = env.step(action, rng)
        if learning:
            q_update(q, state, action, outcome.reward, outcome.next_state,
                     outcome.done, config.alpha, config.gamma)
        total += outcome.reward
        steps.append(TraceStep(state, action, outcome.reward,
                               outcome.next_state, outcome.done))
        cumulative.append(total)
        state = outcome.next_state
        done = outcome.done
        if done:
            break
    return EpisodeTrace(steps=steps, cumulative=cumulative, total_reward=total,
                        truncated=not done)


def train(env: Environment, config: LearnerConfig) -> tuple[QTable, list[EpisodeTrace]]:
    """Run the full training loop; reproducible from config.seed alone.

    Episode i draws from the sub-stream (seed, 0, i), so its randomness
    is independent of every other episode's length.
    """
    if env.observation_space.size < 1 or env.action_space.size < 1:
        raise DimensionMismatch("environment spaces must be non-empty")
    q = QTable(env.observation_space.size, env.action_space.size)
    root = RngStream(config.seed)
    traces = []
    for episode in range(config.episodes):
        epsilon = epsilon_schedule(config, episode)
        rng = root.substream(TRAIN_STREAM, episode)
        traces.append(run_episode(env, q, config, epsilon, rng, learning=True))
    return q, traces


def evaluate_greedy(env: Environment, q: QTable, episodes: int, max_steps: int,
                    seed: int) -> dict:
    """Run greedy (epsilon = 0) episodes with learning off; summarize.

    Success means the episode terminated with a positive final reward.
    episodes = 0 yields an empty report.
    """
    if q.n_states != env.observation_space.size or q.n_actions != env.action_space.size:
        raise DimensionMismatch(
            f"q-table is {q.n_states}x{q.n_actions}, environment is "
            f"{env.observation_space.size}x{env.action_space.size}"
        )
    if episodes == 0:
        return {"episodes": 0}
    config = LearnerConfig(episodes=episodes, max_steps_per_episode=max_steps,
                           seed=seed)
    root = RngStream(seed)
    totals = []
    successes = 0
    truncations = 0
    for i in range(episodes):
        rng = root.substream(EVAL_STREAM, i)
        trace = run_episode(env, q, config, epsilon=0.0, rng=rng, learning=False)
        totals.append(trace.total_reward)
        last = trace.steps[-1]
        if last.done and last.reward > 0:
            successes += 1
        if trace.truncated:
            truncations += 1
    return {
        "episodes": episodes,
        "mean_total_reward": sum(totals) / episodes,
        "min_total_reward": min(totals),
        "max_total_reward": max(totals),
        "success_rate": successes / episodes,
        "truncation_rate": truncations / episodes,
    }


# --- Q-table document format ---------------------------------------------------


def qtable_to_json(q: QTable) -> str:
    return json.dumps(
        {
            "n_states": q.n_states,
            "n_actions": q.n_actions,
            "values": q.values.tolist(),
        },
        indent=1,
    )


def qtable_from_json(text: str) -> QTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    try:
        return QTable(
            n_states=int(doc["n_states"]),
            n_actions=int(doc["n_actions"]),
            values=np.asarray(doc["values"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad q-table document: {exc}") from exc
