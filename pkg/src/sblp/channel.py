"""i.i.d. symmetric depolarizing noise and the matching decoder priors.

Random streams are numpy ``PCG64`` generators seeded through
``SeedSequence``; a stream is identified by an integer key tuple such as
``(master_seed, point_key, block_index)``, so the same key reproduces the same
error patterns on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DepolarizingChannel:
    p: float
    n: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"depolarizing probability must lie in [0, 1], got {self.p}")
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")

    @property
    def p_x(self) -> float:
        return self.p / 3

    p_y = p_z = p_x

    def sample(self, rng: np.random.Generator, shots: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Draw (e_X, e_Z). With ``shots`` the arrays have shape (shots, n).

        One uniform draw r per qubit: r < p/3 is X, r < 2p/3 is Y, r < p is Z.
        """
        size = (self.n,) if shots is None else (shots, self.n)
        r = rng.random(size)
        third = self.p / 3
        e_x = r < 2 * third
        e_z = (r >= third) & (r < self.p)
        return e_x.astype(np.uint8), e_z.astype(np.uint8)


def make_rng(*key: int) -> np.random.Generator:
    """PCG64 stream addressed by a tuple of non-negative integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(key))))


def sample_pauli_error(channel: DepolarizingChannel, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    return channel.sample(rng)


def prior_llr(p: float, cap: float | None = None) -> float:
    """Prior log-likelihood ratio ln((1 - 2p/3) / (2p/3)) of one error bit.

    ``p = 0`` gives an infinite LLR and is rejected unless ``cap`` is given.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {p}")
    q = 2 * p / 3
    if q == 0.0:
        if cap is None:
            raise ValueError("p = 0 gives an infinite prior LLR; pass cap= to clip it")
        return float(cap)
    llr = math.log((1 - q) / q)
    if cap is not None:
        llr = max(-cap, min(cap, llr))
    return llr
