"""Synthetic temperature field read by the reactive protocols.

Each node sees ``baseline + drift + event`` where the drift is a Gaussian
random walk (optionally pulled back toward zero) and events are bursts of
extra magnitude that start with a fixed per-tick probability and last a fixed
number of ticks.  Readings are a pure function of ``(model, seed, node, tick)``:
every node owns its own random stream, generated in fixed-size blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

BLOCK = 512


@dataclass(frozen=True)
class FieldModel:
    baseline: float = 25.0
    event_probability: float = 0.005
    magnitude_low: float = 40.0
    magnitude_high: float = 80.0
    drift_sigma: float = 0.5
    event_duration: int = 5
    # fraction of the drift removed each tick; 0 gives an unbounded random walk
    drift_reversion: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.event_probability <= 1.0:
            raise ValueError("event_probability must lie in [0, 1]")
        if self.magnitude_low > self.magnitude_high:
            raise ValueError("magnitude_low must not exceed magnitude_high")
        if self.drift_sigma < 0:
            raise ValueError("drift_sigma must be non-negative")
        if self.event_duration < 1:
            raise ValueError("event_duration must be at least 1")
        if not 0.0 <= self.drift_reversion <= 1.0:
            raise ValueError("drift_reversion must lie in [0, 1]")

    @classmethod
    def constant(cls, value: float) -> FieldModel:
        """A field that reads ``value`` everywhere, always."""
        return cls(baseline=value, event_probability=0.0, drift_sigma=0.0)


class _NodeStream:
    """Sequential block generator for one node."""

    def __init__(self, model: FieldModel, seed: int, node: int):
        self.model = model
        self.seed = seed
        self.node = node
        self.reset()

    def reset(self):
        self.block = -1
        self.values = None
        self._drift = 0.0
        self._last_onset = -(10**9)
        self._magnitude = 0.0

    def _next_block(self):
        m = self.model
        self.block += 1
        start = self.block * BLOCK
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.node, self.block))
        rng = np.random.default_rng(ss)
        steps = rng.standard_normal(BLOCK) * m.drift_sigma
        onsets = rng.random(BLOCK) < m.event_probability
        mags = rng.uniform(m.magnitude_low, m.magnitude_high, BLOCK)

        phi = 1.0 - m.drift_reversion
        drift, _ = lfilter([1.0], [1.0, -phi], steps, zi=[phi * self._drift])
        self._drift = drift[-1]

        ticks = np.arange(start, start + BLOCK)
        onset_tick = np.where(onsets, ticks, self._last_onset)
        onset_tick = np.maximum.accumulate(onset_tick)
        onset_idx = onset_tick - start
        inside = onset_idx >= 0
        magnitude = np.full(BLOCK, self._magnitude)
        magnitude[inside] = mags[onset_idx[inside]]
        active = (ticks - onset_tick) < m.event_duration

        self._last_onset = int(onset_tick[-1])
        self._magnitude = float(magnitude[-1])
        self.values = m.baseline + drift + np.where(active, magnitude, 0.0)

    def at(self, tick: int) -> float:
        block = tick // BLOCK
        if block < self.block:
            self.reset()
        while self.block < block:
            self._next_block()
        return self.values[tick - block * BLOCK]


class Field:
    """Readings for ``n`` nodes drawn from one field model and seed."""

    def __init__(self, model: FieldModel, seed: int, n: int):
        self.model = model
        self.seed = seed
        self.n = n
        self._trivial = model.event_probability == 0.0 and model.drift_sigma == 0.0
        self._streams = [_NodeStream(model, seed, i) for i in range(n)]
        self._block = -1
        self._matrix = None

    def _load(self, block: int):
        if block < self._block:
            for s in self._streams:
                s.reset()
        for s in self._streams:
            while s.block < block:
                s._next_block()
        self._matrix = np.stack([s.values for s in self._streams])
        self._block = block

    def readings(self, tick: int) -> np.ndarray:
        """Readings of every node at ``tick``."""
        if self._trivial:
            return np.full(self.n, self.model.baseline)
        block = tick // BLOCK
        if block != self._block:
            self._load(block)
        return self._matrix[:, tick - block * BLOCK]

    def sense(self, node: int, tick: int) -> float:
        return float(self.readings(tick)[node])


def sense(model: FieldModel, node: int, tick: int, seed: int) -> float:
    """Reading of ``node`` at ``tick`` for a field seeded with ``seed``."""
    return float(_NodeStream(model, seed, node).at(tick))
