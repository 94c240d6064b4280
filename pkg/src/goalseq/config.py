"""Experiment configuration (one JSON document) and sweep result rows."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields

from .chain import BETA_SEMANTICS, ChainSpec
from .dynamics import CORRUPTIONS, FixedSteps, UntilTermination
from .goalscore import NOISE_KINDS
from .gridworld import DEFAULT_MAP, GridSpec, InvalidGridSpec


class ConfigError(ValueError):
    pass


DEFAULT_PLANNING_STEPS = {"chain": 100, "gridworld": 200}


@dataclass
class SweepConfig:
    p_dyn: list = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4])
    p_goal: list = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4])
    n_states: int = 100
    episodes: int = 200
    # generous so that noisy cells are measured rather than truncated
    max_planning_steps: int = 1000


@dataclass
class ExperimentConfig:
    env: dict = field(default_factory=lambda: {"kind": "chain", "n_states": 19, "start_state": 1})
    beta_semantics: str = "terminate"
    random_beta: float = 0.5
    p_dyn: float = 0.2
    p_goal: float = 0.2
    corruption: str = "local"
    goal_noise_kind: str = "state"
    horizon: dict = field(default_factory=lambda: {"mode": "until_termination", "cap": 200})
    k: int = 32
    seed: int = 0
    episodes: int = 1
    max_planning_steps: int | None = None
    replan_every_step: bool = False
    demo_count: int = 5
    demo_dither: float = 0.0
    scorer_path: str | None = None
    out: str | None = None
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def __post_init__(self):
        self.validate()

    @property
    def env_kind(self) -> str:
        return self.env.get("kind", "chain")

    def validate(self):
        for name in ("p_dyn", "p_goal", "random_beta", "demo_dither"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be a probability, got {v!r}")
        for v in list(self.sweep.p_dyn) + list(self.sweep.p_goal):
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"sweep noise level {v!r} is not a probability")
        if self.beta_semantics not in BETA_SEMANTICS:
            raise ConfigError(f"beta_semantics must be one of {BETA_SEMANTICS}")
        if self.corruption not in CORRUPTIONS:
            raise ConfigError(f"corruption must be one of {CORRUPTIONS}")
        if self.goal_noise_kind not in NOISE_KINDS:
            raise ConfigError(f"goal_noise_kind must be one of {NOISE_KINDS}")
        if self.env_kind not in DEFAULT_PLANNING_STEPS:
            raise ConfigError(f"unknown environment kind {self.env_kind!r}")
        if self.k < 1 or self.episodes < 1 or self.demo_count < 1 or self.sweep.episodes < 1:
            raise ConfigError("k, episodes, demo_count and sweep.episodes must be >= 1")
        if self.max_planning_steps is not None and self.max_planning_steps < 1:
            raise ConfigError("max_planning_steps must be >= 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        self.horizon_mode()

    def planning_steps(self) -> int:
        return self.max_planning_steps or DEFAULT_PLANNING_STEPS[self.env_kind]

    def horizon_mode(self):
        mode = self.horizon.get("mode")
        try:
            if mode == "until_termination":
                return UntilTermination(int(self.horizon.get("cap", 200)))
            if mode == "fixed":
                return FixedSteps(int(self.horizon["n"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad horizon {self.horizon!r}: {exc}") from None
        raise ConfigError(f"unknown horizon mode {mode!r}")

    def world(self):
        env = dict(self.env)
        kind = env.pop("kind", "chain")
        try:
            if kind == "chain":
                return ChainSpec(int(env.get("n_states", 19)), int(env.get("start_state", 1)))
            text = env.get("map", DEFAULT_MAP)
            if isinstance(text, list):
                text = "\n".join(text)
            return GridSpec.from_ascii(text, int(env.get("radius", 1)))
        except InvalidGridSpec as exc:
            raise ConfigError(str(exc)) from None
        except ValueError as exc:
            raise ConfigError(f"bad environment section: {exc}") from None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        sweep = doc.pop("sweep", {})
        try:
            sweep_cfg = SweepConfig(**sweep)
            return cls(**doc, sweep=sweep_cfg)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(doc)


# --------------------------------------------------------------------------
# Sweep results
# --------------------------------------------------------------------------

SWEEP_COLUMNS = ("p_dyn", "p_goal", "episodes", "mean_activations", "median_activations",
                 "stdev", "success_rate")


@dataclass(frozen=True)
class SweepCell:
    p_dyn: float
    p_goal: float
    episodes: int
    mean_activations: float
    median_activations: float
    stdev: float
    success_rate: float

    def __post_init__(self):
        if not 0.0 <= self.success_rate <= 1.0:
            raise ValueError("success rate outside [0, 1]")


@dataclass
class SweepResult:
    cells: list

    def cell(self, p_dyn: float, p_goal: float) -> SweepCell:
        for c in self.cells:
            if math.isclose(c.p_dyn, p_dyn) and math.isclose(c.p_goal, p_goal):
                return c
        raise KeyError((p_dyn, p_goal))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for c in self.cells:
            w.writerow([repr(getattr(c, col)) for col in SWEEP_COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepResult":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != SWEEP_COLUMNS:
            raise ValueError("unexpected sweep CSV header")
        cells = []
        for row in rows[1:]:
            vals = dict(zip(SWEEP_COLUMNS, row))
            cells.append(SweepCell(
                float(vals["p_dyn"]), float(vals["p_goal"]), int(vals["episodes"]),
                float(vals["mean_activations"]), float(vals["median_activations"]),
                float(vals["stdev"]), float(vals["success_rate"]),
            ))
        return cls(cells)
