"""Finite super-space shared by all controllers of one environment."""

from __future__ import annotations

from functools import cached_property

import numpy as np


class World:
    """Base for environments with a finite, enumerable state set.

    Subclasses provide ``states``, ``actions``, ``start``, ``step``,
    ``is_goal``, ``neighborhood``, ``distance`` and the JSON codec. The goal
    is absorbing inside controller models; the true environment ends the
    episode there instead.
    """

    kind = "world"
    metric = "abs"

    states: tuple
    actions: tuple
    start: object

    def step(self, s, a):
        raise NotImplementedError

    def is_goal(self, s) -> bool:
        raise NotImplementedError

    def neighborhood(self, s) -> tuple:
        raise NotImplementedError

    def distance(self, s, t) -> int:
        raise NotImplementedError

    def encode(self, s):
        return s

    def decode(self, obj):
        return obj

    def model_step(self, s, a):
        if self.is_goal(s):
            return s
        return self.step(s, a)[0]

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def step_table(self) -> np.ndarray:
        idx = self.index
        return np.array(
            [[idx[self.model_step(s, a)] for a in self.actions] for s in self.states],
            dtype=np.int64,
        )

    @cached_property
    def neighbor_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Padded neighbour indices (S, max_degree) and per-row degree."""
        idx = self.index
        rows = [[idx[t] for t in self.neighborhood(s)] for s in self.states]
        width = max(len(r) for r in rows)
        table = np.zeros((len(rows), width), dtype=np.int64)
        for i, r in enumerate(rows):
            table[i, : len(r)] = r
        return table, np.array([len(r) for r in rows], dtype=np.int64)

    def to_indices(self, states) -> np.ndarray:
        return np.array([self.index[s] for s in states], dtype=np.int64)
