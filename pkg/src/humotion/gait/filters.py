"""Small causal filters feeding the walking feedback channels."""

from __future__ import annotations

from collections import deque

import numpy as np


def soft_deadband(x: float, width: float) -> float:
    """Continuous deadband: zero inside +-width, shifted identity outside."""
    if width < 0.0:
        raise ValueError("deadband width must be >= 0")
    mag = abs(x) - width
    if mag <= 0.0:
        return 0.0
    return mag if x > 0.0 else -mag


class MeanFilter:
    """Moving average over the last `window` samples."""

    def __init__(self, window: int):
        if window < 1:
            raise ValueError("window must be >= 1")
        self._buf: deque[float] = deque(maxlen=window)

    def update(self, x: float) -> float:
        self._buf.append(float(x))
        return sum(self._buf) / len(self._buf)

    def reset(self) -> None:
        self._buf.clear()


class EwIntegrator:
    """Integrator whose past decays with the configured half-life.

    Each step scales the accumulator by 2^(-dt/half_life) before adding
    x*dt, so a constant input converges to the geometric-series limit
    x*dt/(1 - 2^(-dt/half_life)), which approaches x*half_life/ln2 as
    dt goes to zero.
    """

    def __init__(self, half_life: float):
        if not half_life > 0.0:
            raise ValueError("half-life must be positive")
        self.half_life = half_life
        self.value = 0.0

    def update(self, x: float, dt: float) -> float:
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        decay = 2.0 ** (-dt / self.half_life)
        self.value = decay * self.value + float(x) * dt
        return self.value

    def reset(self) -> None:
        self.value = 0.0


class WlbfFilter:
    """Slope of a recency-weighted line of best fit over the last samples.

    Returns 0 until the window is full. Weights rise linearly from the
    oldest sample (1) to the newest (window), and times are taken relative
    to the oldest buffered sample to keep the normal equations well
    conditioned over long runs.
    """

    def __init__(self, window: int):
        if window < 2:
            raise ValueError("window must be >= 2 to define a slope")
        self.window = window
        self._t: deque[float] = deque(maxlen=window)
        self._x: deque[float] = deque(maxlen=window)
        self._now = 0.0

    def update(self, x: float, dt: float) -> float:
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        self._now += dt
        self._t.append(self._now)
        self._x.append(float(x))
        if len(self._x) < self.window:
            return 0.0
        t = np.array(self._t) - self._t[0]
        v = np.array(self._x)
        w = np.arange(1.0, len(v) + 1.0)
        t_bar = float(w @ t) / float(w.sum())
        v_bar = float(w @ v) / float(w.sum())
        denom = float(w @ ((t - t_bar) ** 2))
        if denom == 0.0:
            return 0.0
        return float(w @ ((t - t_bar) * (v - v_bar))) / denom

    def reset(self) -> None:
        self._t.clear()
        self._x.clear()
        self._now = 0.0
