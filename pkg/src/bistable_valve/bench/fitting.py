from __future__ import annotations

from typing import NamedTuple

import numpy as np


class ExponentialFit(NamedTuple):
    a: float     # s
    b: float     # 1/cycle
    rms: float   # RMS residual of ln T


def fit_exponential(series) -> ExponentialFit:
    """Least-squares fit of ``T = a * exp(b * n)`` via linear regression on ``ln T``.

    ``series`` is an iterable of ``(n, T)`` pairs; at least 10 are required.
    """
    arr = np.asarray(list(series), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("series must be (n, T) pairs")
    if len(arr) < 10:
        raise ValueError(f"need at least 10 points, got {len(arr)}")
    n, T = arr[:, 0], arr[:, 1]
    if np.any(~np.isfinite(T)) or np.any(T <= 0):
        raise ValueError("response times must be positive and finite")
    A = np.column_stack([np.ones_like(n), n])
    (ln_a, b), *_ = np.linalg.lstsq(A, np.log(T), rcond=None)
    resid = np.log(T) - (ln_a + b * n)
    return ExponentialFit(float(np.exp(ln_a)), float(b), float(np.sqrt(np.mean(resid ** 2))))


def multiplicative_noise(values, level: float, seed: int = 0) -> np.ndarray:
    """``values * (1 + level * N(0, 1))`` drawn from a seeded generator."""
    values = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    return values * (1.0 + level * rng.standard_normal(values.shape))
