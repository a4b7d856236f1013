"""Synthetic Hertzsprung-Russell diagram counts for exercising the chunk workflow.

Each event is one star drawn from a Salpeter-like mass function and placed
near the main sequence (or, for a fraction, on the giant branch). Counts are
binned by log effective temperature, then by log luminosity.
"""
from __future__ import annotations

import math
import random
from typing import Iterator

from .core import Node

LOG_TEFF_WIDTH = 1 / 32
LOG_L_WIDTH = 0.25

_IMF_SLOPE = 2.35
_M_LO, _M_HI = 0.1, 80.0
_GIANT_FRACTION = 0.12


def events(seed: int) -> Iterator[tuple[float, float]]:
    """Endless ``(log Teff, log L)`` stream, fully determined by ``seed``."""
    rng = random.Random(seed)
    a = 1.0 - _IMF_SLOPE
    lo, hi = _M_LO ** a, _M_HI ** a
    while True:
        mass = (lo + rng.random() * (hi - lo)) ** (1.0 / a)
        logm = math.log10(mass)
        if rng.random() < _GIANT_FRACTION:
            log_teff = rng.gauss(3.66, 0.04)
            log_l = rng.gauss(1.5 + 1.5 * logm, 0.4)
        else:
            log_teff = 3.762 + 0.57 * logm + rng.gauss(0.0, 0.015)
            log_l = 3.6 * logm + rng.gauss(0.0, 0.08)
        yield log_teff, log_l


def fill(node: Node, stream: Iterator[tuple[float, float]], count: int) -> Node:
    widths = (LOG_TEFF_WIDTH, LOG_L_WIDTH)
    for _ in range(count):
        node.hist_add((), next(stream), widths, 1)
    return node


def chunks(k: int, m: int, seed: int) -> list[Node]:
    """``k`` histograms of ``m`` consecutive events each, from one seeded stream."""
    if k < 1 or m < 1:
        raise ValueError("need at least one chunk and one event per chunk")
    stream = events(seed)
    return [fill(Node(), stream, m) for _ in range(k)]
