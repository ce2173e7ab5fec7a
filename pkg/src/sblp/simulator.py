"""Monte-Carlo logical error rate estimation.

Trials are grouped into fixed-size blocks. Block ``b`` of the point at
probability ``p`` draws its errors from the stream
``make_rng(seed, point_key(p), b)``, so

* every decoder sees the same errors at a given (seed, p) (common random
  numbers), and
* tallies do not depend on how blocks are spread over worker processes.

Blocks are reduced in index order and a point stops after the first block at
which the cumulative logical error count reaches the target, or when the trial
cap is hit.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from statistics import NormalDist

import numpy as np

from . import gf2
from .channel import DepolarizingChannel, make_rng, prior_llr
from .codes import CssCode
from .decoders import KINDS, DecodeOutcome, DecoderConfig, decode_batch

CSV_COLUMNS = (
    "decoder", "p", "trials", "logical_errors", "ler", "ci_low", "ci_high",
    "avg_ms_iters", "avg_lp_iters", "avg_total_iters", "seed",
)
DEFAULT_BLOCK = 1000


class Classification(str, enum.Enum):
    SUCCESS = "success"
    LOGICAL_FAILURE = "logical-failure"
    NON_CONVERGENCE = "non-convergence"


@dataclass
class TrialRecord:
    index: int
    e: np.ndarray  # true X error
    outcome: DecodeOutcome
    classification: Classification


@dataclass(frozen=True)
class StopRule:
    target_logical_errors: int = 100
    max_trials: int = 100_000

    def __post_init__(self) -> None:
        if self.max_trials <= 0:
            raise ValueError("max_trials must be positive")
        if self.target_logical_errors <= 0:
            raise ValueError("target_logical_errors must be positive")


@dataclass
class PointStats:
    decoder: str
    p: float
    trials: int
    logical_errors: int
    ler: float
    ci_low: float
    ci_high: float
    avg_ms_iters: float
    avg_lp_iters: float
    avg_total_iters: float
    seed: int
    failures: int = 0  # converged to a wrong coset
    non_converged: int = 0
    traces: list[tuple[int, str, list[int]]] | None = field(default=None, repr=False)

    def csv_row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("traces")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> PointStats:
        names = {f.name for f in fields(cls)} - {"traces"}
        return cls(**{k: v for k, v in d.items() if k in names})


def _fmt(x) -> str:
    # repr of a float is the shortest string that round-trips exactly
    return repr(x) if isinstance(x, float) else str(x)


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion k / n."""
    if n <= 0 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n and n > 0, got k={k}, n={n}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = k / n
    z2n = z * z / n
    centre = (phat + z2n / 2) / (1 + z2n)
    half = z / (1 + z2n) * math.sqrt(phat * (1 - phat) / n + z2n / (4 * n))
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def point_key(p: float) -> int:
    """Integer stream key of a probability (resolution 1e-12)."""
    return int(round(p * 1e12))


# ---------------------------------------------------------------------------
# classification


def classify_outcome(e, outcome: DecodeOutcome, code: CssCode,
                     stabilizers: gf2.RowSpace | None = None) -> Classification:
    """Degeneracy-aware verdict for an X-error decode against H_Z.

    A converged estimate succeeds when it differs from the true error by an
    element of the row space of H_X.
    """
    if not outcome.converged:
        return Classification.NON_CONVERGENCE
    rs = stabilizers if stabilizers is not None else gf2.RowSpace(code.hx)
    residual = np.asarray(outcome.e_hat, dtype=np.uint8) ^ gf2.as_bits(e, code.n)
    return Classification.SUCCESS if residual in rs else Classification.LOGICAL_FAILURE


# ---------------------------------------------------------------------------
# block worker

_CACHE: dict = {}


def _stabilizers(code: CssCode) -> gf2.RowSpace:
    key = (code.name, hash(code.hx))
    if key not in _CACHE:
        _CACHE.clear()
        _CACHE[key] = gf2.RowSpace(code.hx)
    return _CACHE[key]


@dataclass(frozen=True)
class _Block:
    code: CssCode
    kind: str
    p: float
    config: DecoderConfig
    seed: int
    index: int
    start: int
    size: int
    trace: bool


def sample_block(code: CssCode, p: float, seed: int, block: int, size: int) -> np.ndarray:
    """X components of the depolarizing errors of one block, shape (size, n)."""
    e_x, _ = DepolarizingChannel(p, code.n).sample(make_rng(seed, point_key(p), block), size)
    return e_x


def _prior(p: float, config: DecoderConfig) -> float:
    if p == 0.0:
        # every syndrome is zero; any finite prior gives the same result
        return prior_llr(0.0, cap=config.llr_cap or 1e3)
    return prior_llr(p, cap=config.llr_cap)


def run_block(job: _Block) -> dict:
    code = job.code
    e_x = sample_block(code, job.p, job.seed, job.index, job.size)
    S = gf2.syndrome(e_x, code.hz)
    lam = _prior(job.p, job.config)
    out = decode_batch(job.kind, S, code.x_graph, job.config, lam, trace=job.trace)
    rs = _stabilizers(code)
    failures = 0
    verdicts = []
    for r in range(job.size):
        if not out.converged[r]:
            verdicts.append(Classification.NON_CONVERGENCE)
        elif (out.e_hat[r] ^ e_x[r]) in rs:
            verdicts.append(Classification.SUCCESS)
        else:
            failures += 1
            verdicts.append(Classification.LOGICAL_FAILURE)
    traces = None
    if job.trace:
        traces = [(job.start + r, verdicts[r].value, out.traces[r]) for r in range(job.size)]
    return {
        "trials": job.size,
        "failures": failures,
        "non_converged": int((~out.converged).sum()),
        "ms": int(out.ms_iterations.sum()),
        "lp": int(out.lp_iterations.sum()),
        "traces": traces,
    }


def iter_trials(code: CssCode, kind: str, p: float, config: DecoderConfig, seed: int,
                block: int = 0, size: int = DEFAULT_BLOCK) -> list[TrialRecord]:
    """Full per-trial records of one block (for inspection and tests)."""
    e_x = sample_block(code, p, seed, block, size)
    S = gf2.syndrome(e_x, code.hz)
    lam = _prior(p, config)
    out = decode_batch(kind, S, code.x_graph, config, lam, trace=True)
    rs = _stabilizers(code)
    return [
        TrialRecord(block * size + r, e_x[r], out[r], classify_outcome(e_x[r], out[r], code, rs))
        for r in range(size)
    ]


# ---------------------------------------------------------------------------
# points and sweeps


def _blocks(stop: StopRule, block_size: int):
    start, index = 0, 0
    while start < stop.max_trials:
        size = min(block_size, stop.max_trials - start)
        yield index, start, size
        start += size
        index += 1


def run_point(code: CssCode, kind: str, p: float, config: DecoderConfig, stop: StopRule, seed: int,
              workers: int = 1, block_size: int = DEFAULT_BLOCK, trace: bool = False,
              count_non_convergence: bool = True, executor: ProcessPoolExecutor | None = None) -> PointStats:
    """Estimate the logical error rate of one decoder at one probability.

    With ``count_non_convergence=False`` only converged-but-wrong outcomes
    count as logical errors; non-convergences are still reported separately.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown decoder kind {kind!r}")
    if block_size <= 0:
        raise ValueError("block_size must be positive")
    jobs = [_Block(code, kind, p, config, seed, i, s, n, trace) for i, s, n in _blocks(stop, block_size)]

    totals = {"trials": 0, "failures": 0, "non_converged": 0, "ms": 0, "lp": 0}
    traces: list = []

    def errors() -> int:
        return totals["failures"] + (totals["non_converged"] if count_non_convergence else 0)

    def absorb(res: dict) -> None:
        for k in totals:
            totals[k] += res[k]
        if trace:
            traces.extend(res["traces"])

    if workers <= 1 and executor is None:
        for job in jobs:
            absorb(run_block(job))
            if errors() >= stop.target_logical_errors:
                break
    else:
        own = executor is None
        pool = executor or ProcessPoolExecutor(max_workers=workers)
        try:
            wave = max(1, workers)
            done = False
            for w in range(0, len(jobs), wave):
                # results are consumed in block order, so extra blocks of the
                # final wave are simply discarded
                for res in pool.map(run_block, jobs[w:w + wave]):
                    absorb(res)
                    if errors() >= stop.target_logical_errors:
                        done = True
                        break
                if done:
                    break
        finally:
            if own:
                pool.shutdown()

    n = totals["trials"]
    k = errors()
    lo, hi = wilson_interval(k, n)
    return PointStats(
        decoder=kind, p=float(p), trials=n, logical_errors=k, ler=k / n, ci_low=lo, ci_high=hi,
        avg_ms_iters=totals["ms"] / n, avg_lp_iters=totals["lp"] / n,
        avg_total_iters=(totals["ms"] + totals["lp"]) / n, seed=seed,
        failures=totals["failures"], non_converged=totals["non_converged"],
        traces=traces if trace else None,
    )


@dataclass
class SweepResult:
    points: list[PointStats]

    def to_csv(self) -> str:
        return points_to_csv(self.points)


def points_to_csv(points: Sequence[PointStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for pt in points:
        w.writerow(pt.csv_row())
    return buf.getvalue()


def sweep(code: CssCode, kinds: Sequence[str], p_list: Sequence[float], configs, stop: StopRule,
          seed: int, workers: int = 1, block_size: int = DEFAULT_BLOCK, trace: bool = False,
          count_non_convergence: bool = True, on_point=None, skip=None) -> SweepResult:
    """One :class:`PointStats` per (decoder, p), decoders outermost.

    ``configs`` is a single :class:`DecoderConfig` or a mapping from kind to
    config. ``on_point`` is called after each finished point; ``skip`` maps
    (kind, p) to an already computed point, which is reused as is.
    """
    if not p_list:
        raise ValueError("p-list must not be empty")
    skip = skip or {}
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    points = []
    try:
        for kind in kinds:
            cfg = configs[kind] if isinstance(configs, dict) else configs
            for p in p_list:
                pt = skip.get((kind, float(p)))
                if pt is None:
                    pt = run_point(code, kind, p, cfg, stop, seed, workers=workers, block_size=block_size,
                                   trace=trace, count_non_convergence=count_non_convergence, executor=pool)
                    if on_point is not None:
                        on_point(pt)
                points.append(pt)
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(points)


def default_workers() -> int:
    env = os.environ.get("SBLP_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("SBLP_WORKERS must be a positive integer")
        return n
    return 1
