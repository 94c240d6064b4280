"""Goal-progress estimation from whole-task demonstrations.

Every state of a demonstration of length T+1 is labelled with its normalised
time t/T. A state seen in several demonstrations keeps one mixture component
per demonstration, so differing demo lengths show up as separate modes
instead of being averaged away.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from statistics import fmean, pstdev
from typing import Any, Hashable, Sequence

import numpy as np

NOISE_KINDS = ("state", "value")


@dataclass(frozen=True)
class Demonstration:
    """A recorded full-task trajectory; timestamps default to 0..T."""

    states: tuple
    id: Any = 0
    times: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) < 2:
            raise ValueError(f"demonstration {self.id!r} has fewer than 2 states")
        if self.times is not None:
            object.__setattr__(self, "times", tuple(self.times))
            if len(self.times) != len(self.states) or any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("timestamps must be strictly increasing, one per state")

    def progress_labels(self) -> list[float]:
        times = self.times if self.times is not None else range(len(self.states))
        t0, t1 = times[0], times[-1]
        return [(t - t0) / (t1 - t0) for t in times]

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class Component:
    mean: float
    spread: float
    weight: float


@dataclass(frozen=True)
class ProgressDistribution:
    components: tuple[Component, ...]

    @property
    def mean(self) -> float:
        means = [c.mean for c in self.components]
        value = math.fsum(c.weight * c.mean for c in self.components)
        # keep the summary inside the component range (exact when they agree)
        return float(min(max(value, min(means)), max(means)))

    @classmethod
    def point(cls, value: float) -> "ProgressDistribution":
        return cls((Component(value, 0.0, 1.0),))


def _metric(name: str):
    if name == "abs":
        return lambda a, b: abs(a - b)
    if name == "manhattan":
        return lambda a, b: abs(a[0] - b[0]) + abs(a[1] - b[1])
    raise ValueError(f"unknown state metric {name!r}")


@dataclass(frozen=True, eq=False)
class GoalScorer:
    """Lookup from state key to progress mixture, with nearest-key fallback.

    ``noise_p`` > 0 makes ``score`` lie: with that probability per call it
    reports the mixture of a uniformly drawn known key (``state`` noise) or a
    uniform value on [0, 1] (``value`` noise).
    """

    table: dict
    metric: str = "abs"
    noise_p: float = 0.0
    noise_kind: str = "state"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.noise_p <= 1.0:
            raise ValueError("noise_p must lie in [0, 1]")
        if self.noise_kind not in NOISE_KINDS:
            raise ValueError(f"unknown goal noise kind {self.noise_kind!r}")
        _metric(self.metric)

    @property
    def keys(self) -> list:
        return sorted(self.table)

    def nearest_key(self, s: Hashable):
        if s in self.table:
            return s
        dist = _metric(self.metric)
        # sorted keys + strict '<' keeps the lower key on distance ties
        best, best_d = None, None
        for key in self.keys:
            d = dist(key, s)
            if best_d is None or d < best_d:
                best, best_d = key, d
        return best

    def lookup(self, s) -> ProgressDistribution:
        """Noise-free mixture for ``s`` (fallback applied)."""
        return self.table[self.nearest_key(s)]

    def score(self, s, rng: np.random.Generator | None = None) -> ProgressDistribution:
        if self.noise_p == 0.0:
            return self.lookup(s)
        if rng is None:
            raise ValueError("a noisy scorer needs an rng")
        if rng.random() >= self.noise_p:
            return self.lookup(s)
        if self.noise_kind == "state":
            keys = self.keys
            return self.table[keys[int(rng.integers(len(keys)))]]
        return ProgressDistribution.point(float(rng.random()))

    # -- vectorised paths over a world's state index -------------------------

    def point_table(self, world) -> np.ndarray:
        """Noise-free point summary for every state of ``world``."""
        key = ("point", world)
        if key not in self._cache:
            self._cache[key] = np.array([self.lookup(s).mean for s in world.states])
        return self._cache[key]

    def key_points(self) -> np.ndarray:
        if "keys" not in self._cache:
            self._cache["keys"] = np.array([self.table[k].mean for k in self.keys])
        return self._cache["keys"]

    def expected_point_table(self, world) -> np.ndarray:
        """Expected reported point summary per state, noise averaged out."""
        base = self.point_table(world)
        if self.noise_kind == "state":
            lie = self.key_points().mean()
        else:
            lie = 0.5
        return (1.0 - self.noise_p) * base + self.noise_p * lie

    def score_indices(self, world, indices: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Point summaries reported for a batch of state indices."""
        out = self.point_table(world)[indices]
        if self.noise_p == 0.0:
            return out
        n = len(indices)
        lie = rng.random(n) < self.noise_p
        if self.noise_kind == "state":
            pts = self.key_points()
            fake = pts[rng.integers(len(pts), size=n)]
        else:
            fake = rng.random(n)
        return np.where(lie, fake, out)

    # -- persistence ---------------------------------------------------------

    def to_json(self, encode=lambda s: s) -> str:
        doc = {
            "metric": self.metric,
            "fallback": "nearest_key",
            "noise": {"p": self.noise_p, "kind": self.noise_kind},
            "entries": [
                {
                    "state": encode(k),
                    "components": [[c.mean, c.spread, c.weight] for c in self.table[k].components],
                }
                for k in self.keys
            ],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str, decode=lambda obj: obj) -> "GoalScorer":
        doc = json.loads(text)
        table = {}
        for e in doc["entries"]:
            comps = tuple(Component(*map(float, c)) for c in e["components"])
            table[decode(e["state"])] = ProgressDistribution(comps)
        noise = doc.get("noise", {})
        return cls(table, doc["metric"], float(noise.get("p", 0.0)), noise.get("kind", "state"))


def fit_from_demos(demos: Sequence[Demonstration], metric: str = "abs") -> GoalScorer:
    if not demos:
        raise ValueError("need at least one demonstration")
    labels: dict = {}
    for i, demo in enumerate(demos):
        for s, label in zip(demo.states, demo.progress_labels()):
            labels.setdefault(s, {}).setdefault(i, []).append(label)
    table = {}
    for s, per_demo in labels.items():
        total = sum(len(v) for v in per_demo.values())
        table[s] = ProgressDistribution(
            tuple(Component(fmean(v), pstdev(v), len(v) / total) for v in per_demo.values())
        )
    return GoalScorer(table, metric)


def noisy_wrap(g: GoalScorer, p_g: float, kind: str = "state") -> GoalScorer:
    return replace(g, noise_p=p_g, noise_kind=kind, _cache={})


def monotonicity_report(g: GoalScorer, demo: Demonstration, rng: np.random.Generator | None = None):
    """Mean-score trace along ``demo`` and its number of strict decreases."""
    trace = [(t, g.score(s, rng).mean) for t, s in enumerate(demo.states)]
    drops = sum(1 for (_, a), (_, b) in zip(trace, trace[1:]) if b < a)
    return trace, drops
