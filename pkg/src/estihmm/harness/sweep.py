"""Maximal-set counts over a grid of binary transition parameters."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..engine import decode
from ..model import ModelError, binary_model, linear_vacuous, validate


@dataclass(frozen=True)
class SweepConfig:
    """One heat-map run for the binary stationary model.

    ``p`` is P(next=0 | current=0) and ``q`` is P(next=0 | current=1); both
    run over ``resolution`` evenly spaced exact rationals in [0, 1] unless
    explicit ``p_values``/``q_values`` are given.
    """

    resolution: int = 201
    m: object = Fraction(1, 10)
    r: object = Fraction(4, 5)
    s: object = Fraction(3, 10)
    obs: str = "01"
    eps_marginal: object = 0
    eps_transition: object = 0
    eps_emission: object = 0
    backend: str = "log"
    tau: float = 1e-12
    p_values: tuple | None = None
    q_values: tuple | None = None

    def __post_init__(self):
        if self.p_values is None and self.q_values is None and self.resolution < 2:
            raise ValueError(f"grid resolution must be >= 2, got {self.resolution}")
        for name in ("m", "r", "s", "eps_marginal", "eps_transition", "eps_emission"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if not self.obs or any(c not in "01" for c in self.obs):
            raise ValueError(f"obs must be a non-empty string over '0'/'1', got {self.obs!r}")

    @property
    def n(self) -> int:
        return len(self.obs)

    def axis(self, explicit) -> tuple:
        if explicit is not None:
            return tuple(explicit)
        last = self.resolution - 1
        return tuple(Fraction(i, last) for i in range(self.resolution))

    @property
    def ps(self) -> tuple:
        return self.axis(self.p_values)

    @property
    def qs(self) -> tuple:
        return self.axis(self.q_values)


@dataclass(frozen=True)
class SweepResult:
    """``counts[i][j]`` is the maximal-set size at ``(ps[i], qs[j])``; None if invalid."""

    ps: tuple
    qs: tuple
    counts: tuple

    def count(self, i: int, j: int) -> int | None:
        return self.counts[i][j]

    def cells(self):
        for i, p in enumerate(self.ps):
            for j, q in enumerate(self.qs):
                yield p, q, self.counts[i][j]


def cell_count(config: SweepConfig, p, q) -> int | None:
    """Decode count for one grid point, or None if the model there is invalid."""
    try:
        base = binary_model(config.m, config.r, config.s, p, q, config.n)
        model = linear_vacuous(
            base, config.eps_marginal, config.eps_transition, config.eps_emission
        )
    except ModelError:
        return None
    if not validate(model).ok:
        return None
    return decode(model, config.obs, policy=config.tau, backend=config.backend, check=False).count


def _row(args) -> tuple:
    config, p = args
    return tuple(cell_count(config, p, q) for q in config.qs)


def default_threads() -> int:
    env = os.environ.get("ESTIHMM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep_grid(config: SweepConfig, threads: int = 1) -> SweepResult:
    """Count maximal sequences at every grid cell (rows in parallel if ``threads > 1``)."""
    ps = config.ps
    jobs = [(config, p) for p in ps]
    if threads > 1 and len(ps) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(_row, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        rows = tuple(_row(j) for j in jobs)
    return SweepResult(ps, config.qs, rows)


def counts_matrix(result: SweepResult) -> list[list[int | None]]:
    return [list(r) for r in result.counts]


def sweep_cells(config: SweepConfig, points: Sequence[tuple]) -> list[int | None]:
    """Counts at arbitrary ``(p, q)`` points with the rest of ``config``."""
    return [cell_count(config, p, q) for p, q in points]
