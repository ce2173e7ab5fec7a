"""Syndrome-based min-sum, iterative LP, and their combination.

All three decoders work on flat per-edge message buffers laid out in the
Tanner graph's edge order. The compiled loops live in :mod:`sblp._kernels`;
this module holds the configuration, state and outcome types and the Python
entry points. :func:`decode_batch` is the workhorse used by the simulator.

Iteration budgets count executed iterations: a budget of 25 means at most
25 passes of the loop body.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .codes import TannerGraph

KINDS = ("sb-ms", "sb-lp", "combined", "combined-no-early-stop")
HANDOFFS = ("messages", "zero")


class StopReason(str, enum.Enum):
    SYNDROME_MATCHED = "syndrome-matched"
    BUDGET_EXHAUSTED = "budget-exhausted"
    EARLY_STOPPED_THEN_LP = "early-stopped-then-lp"


class ParityClass(enum.IntEnum):
    EVEN = 0
    ODD = 1


@dataclass(frozen=True)
class DecoderConfig:
    alpha: float = 0.75
    alpha1: float = 0.9
    ims_max: int = 100
    ilp_max: int = 100
    early_stop: bool = True
    dv_threshold: int | None = None  # None: maximum variable-node degree
    llr_cap: float | None = None  # off: messages are not clipped
    handoff: str = "messages"  # LP start after the MS stage: "messages" (u + v) or "zero"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 < self.alpha1 <= 1.0:
            raise ValueError(f"alpha1 must lie in (0, 1], got {self.alpha1}")
        if self.ims_max < 0 or self.ilp_max < 0:
            raise ValueError("iteration budgets must be non-negative")
        if self.dv_threshold is not None and self.dv_threshold < 0:
            raise ValueError("dv_threshold must be non-negative")
        if self.llr_cap is not None and not self.llr_cap > 0:
            raise ValueError("llr_cap must be positive")
        if self.handoff not in HANDOFFS:
            raise ValueError(f"handoff must be one of {', '.join(HANDOFFS)}, got {self.handoff!r}")

    @classmethod
    def for_kind(cls, kind: str, **overrides) -> DecoderConfig:
        """Default parameters for a decoder kind: 100 iterations standalone, 25 + 75 combined."""
        if kind not in KINDS:
            raise ValueError(f"unknown decoder kind {kind!r}; choose from {', '.join(KINDS)}")
        base = {"ims_max": 100, "ilp_max": 100}
        if kind.startswith("combined"):
            base = {"ims_max": 25, "ilp_max": 75, "early_stop": kind == "combined"}
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def threshold(self, graph: TannerGraph) -> int:
        return graph.dv_max if self.dv_threshold is None else self.dv_threshold


@dataclass
class MsState:
    """Min-sum message buffers of a single decoding run."""

    u: np.ndarray  # check -> variable, per edge
    v: np.ndarray  # variable -> check, per edge
    lam: np.ndarray  # prior LLR per variable
    e_hat: np.ndarray
    s_hat: np.ndarray
    iteration: int = 0

    @classmethod
    def initial(cls, graph: TannerGraph, lam: np.ndarray) -> MsState:
        lead = lam.shape[:-1]
        E = graph.num_edges
        return cls(
            u=np.zeros(lead + (E,)),
            v=np.zeros(lead + (E,)),
            lam=lam,
            e_hat=np.zeros(lead + (graph.n,), dtype=np.uint8),
            s_hat=np.zeros(lead + (graph.m,), dtype=np.uint8),
        )


@dataclass
class LpState:
    """LP edge values. ``u_bar`` is the read buffer of the next iteration;
    each iteration writes a fresh array, so reads never see partial updates.
    """

    u_bar: np.ndarray
    lam: np.ndarray
    e_hat: np.ndarray
    s_hat: np.ndarray
    iteration: int = 0

    @classmethod
    def initial(cls, graph: TannerGraph, lam: np.ndarray, u_bar: np.ndarray | None = None) -> LpState:
        lead = lam.shape[:-1]
        if u_bar is None:
            u_bar = np.zeros(lead + (graph.num_edges,))
        elif u_bar.shape[-1] != graph.num_edges:
            raise ValueError(f"init_u_bar has {u_bar.shape[-1]} entries, graph has {graph.num_edges} edges")
        return cls(
            u_bar=np.array(u_bar, dtype=np.float64),
            lam=lam,
            e_hat=np.zeros(lead + (graph.n,), dtype=np.uint8),
            s_hat=np.zeros(lead + (graph.m,), dtype=np.uint8),
        )


@dataclass
class DecodeOutcome:
    e_hat: np.ndarray
    s_hat: np.ndarray
    converged: bool
    ms_iterations: int
    lp_iterations: int
    stop_reason: StopReason
    trace: list[int] | None = None  # unmatched syndrome bits after each iteration

    @property
    def total_iterations(self) -> int:
        return self.ms_iterations + self.lp_iterations


@dataclass
class BatchOutcome:
    """Per-row results of decoding a (batch, m) syndrome array."""

    e_hat: np.ndarray
    s_hat: np.ndarray
    converged: np.ndarray
    ms_iterations: np.ndarray
    lp_iterations: np.ndarray
    stop_reason: np.ndarray  # object array of StopReason
    traces: list[list[int]] | None = None

    def __len__(self) -> int:
        return len(self.converged)

    def __getitem__(self, r: int) -> DecodeOutcome:
        return DecodeOutcome(
            e_hat=self.e_hat[r],
            s_hat=self.s_hat[r],
            converged=bool(self.converged[r]),
            ms_iterations=int(self.ms_iterations[r]),
            lp_iterations=int(self.lp_iterations[r]),
            stop_reason=self.stop_reason[r],
            trace=None if self.traces is None else self.traces[r],
        )


# ---------------------------------------------------------------------------
# scalar primitives


def hd(x):
    """Hard decision: 0 if x > 0 else 1 (zero decides 1)."""
    out = np.where(np.asarray(x) > 0, 0, 1).astype(np.uint8)
    return int(out) if out.ndim == 0 else out


def sgn(x):
    """+1 if x > 0 else -1, i.e. 1 - 2 hd(x)."""
    out = np.where(np.asarray(x) > 0, 1.0, -1.0)
    return float(out) if out.ndim == 0 else out


def spc_max(values, parity: ParityClass | int) -> float:
    """max over binary x of the given weight parity of sum(values[k] * x[k]).

    Same compiled routine the LP update uses for its per-check maximizations.
    """
    x = np.ascontiguousarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("spc_max expects a 1-D vector")
    if len(x) == 0 and int(parity) == ParityClass.ODD:
        raise ValueError("no odd-weight vector of length 0")
    even, odd = _kernels.spc_both(x, 0, len(x), -1)
    return float(odd if int(parity) == ParityClass.ODD else even)


def check_update(v, s_i: int) -> np.ndarray:
    """Min-sum check-to-variable messages of a single check node."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    u = np.empty_like(v)
    _kernels.cn_minsum(v, 0, len(v), int(s_i), u, 0.0)
    return u


# ---------------------------------------------------------------------------
# iteration-level API


def _as_syndrome(s, graph: TannerGraph) -> np.ndarray:
    s = np.ascontiguousarray(s, dtype=np.uint8)
    if s.shape[-1:] != (graph.m,):
        raise ValueError(f"syndrome length {s.shape[-1:]} does not match {graph.m} checks")
    return s


def _priors(priors, graph: TannerGraph, batch: int) -> np.ndarray:
    lam = np.asarray(priors, dtype=np.float64)
    if lam.ndim == 0:
        lam = np.full(graph.n, float(lam))
    if lam.shape[-1] != graph.n:
        raise ValueError(f"priors have length {lam.shape[-1]}, graph has {graph.n} variables")
    return np.ascontiguousarray(np.broadcast_to(lam, (batch, graph.n)))


def _cap(config: DecoderConfig) -> float:
    return 0.0 if config.llr_cap is None else float(config.llr_cap)


def ms_iteration(state: MsState, s, graph: TannerGraph, config: DecoderConfig) -> MsState:
    """Return the state after one min-sum iteration; ``state`` is not modified."""
    s = _as_syndrome(s, graph)
    new = MsState(u=state.u.copy(), v=state.v.copy(), lam=state.lam, e_hat=state.e_hat.copy(),
                  s_hat=state.s_hat.copy(), iteration=state.iteration + 1)
    _kernels.ms_pass(new.u, new.v, np.ascontiguousarray(state.lam, dtype=np.float64), s, config.alpha,
                     _cap(config), graph.check_ptr, graph.edge_var, graph.var_ptr, graph.var_edges,
                     new.e_hat, new.s_hat)
    return new


def sb_lp_iteration(state: LpState, s, graph: TannerGraph, config: DecoderConfig) -> LpState:
    """Return the state after one LP iteration.

    All edges are computed from ``state.u_bar`` into a fresh buffer.
    """
    s = _as_syndrome(s, graph)
    out = np.empty_like(state.u_bar)
    e_hat = state.e_hat.copy()
    s_hat = state.s_hat.copy()
    _kernels.lp_pass(state.u_bar, out, np.ascontiguousarray(state.lam, dtype=np.float64), s, config.alpha1,
                     _cap(config), graph.check_ptr, graph.edge_var, graph.var_ptr, graph.var_edges,
                     graph.var_slot, e_hat, s_hat)
    return replace(state, u_bar=out, e_hat=e_hat, s_hat=s_hat, iteration=state.iteration + 1)


# ---------------------------------------------------------------------------
# batched decoding

_MODES = {
    "sb-ms": _kernels.MODE_MS,
    "sb-lp": _kernels.MODE_LP,
    "combined": _kernels.MODE_COMBINED,
    "combined-no-early-stop": _kernels.MODE_COMBINED_NO_ES,
}


def decode_batch(kind: str, S, graph: TannerGraph, config: DecoderConfig, priors,
                 init_u_bar: np.ndarray | None = None, trace: bool = False) -> BatchOutcome:
    """Decode every row of the (batch, m) syndrome array ``S``.

    ``kind`` is one of ``sb-ms``, ``sb-lp``, ``combined`` or
    ``combined-no-early-stop``; the two combined kinds fix early stopping on
    or off regardless of ``config.early_stop``. ``init_u_bar`` seeds the edge
    values of the standalone LP decoder.
    """
    if kind not in _MODES:
        raise ValueError(f"unknown decoder kind {kind!r}; choose from {', '.join(KINDS)}")
    S = np.atleast_2d(_as_syndrome(S, graph))
    B, E = len(S), graph.num_edges
    lam = _priors(priors, graph, B)
    if init_u_bar is None:
        init = np.zeros((0, E))
    else:
        if kind != "sb-lp":
            raise ValueError("init_u_bar only applies to the standalone LP decoder")
        init = np.asarray(init_u_bar, dtype=np.float64)
        if init.shape[-1] != E:
            raise ValueError(f"init_u_bar has {init.shape[-1]} entries, graph has {E} edges")
        init = np.ascontiguousarray(np.broadcast_to(init, (B, E)))
    width = config.ims_max + config.ilp_max if trace else 0
    trace_buf = np.full((B, width), -1, dtype=np.int64)
    e_hat = np.zeros((B, graph.n), dtype=np.uint8)
    s_hat = np.zeros((B, graph.m), dtype=np.uint8)
    ms_iters = np.zeros(B, dtype=np.int64)
    lp_iters = np.zeros(B, dtype=np.int64)
    early = np.zeros(B, dtype=np.bool_)
    _kernels.decode_rows(
        _MODES[kind], S, lam, config.alpha, config.alpha1, config.ims_max, config.ilp_max,
        config.threshold(graph), _cap(config), config.handoff == "zero", init,
        graph.check_ptr, graph.edge_var, graph.var_ptr, graph.var_edges, graph.var_slot,
        e_hat, s_hat, ms_iters, lp_iters, early, trace_buf,
    )
    converged = ~(S != s_hat).any(axis=1)
    reasons = np.empty(B, dtype=object)
    reasons[:] = StopReason.BUDGET_EXHAUSTED
    reasons[converged] = StopReason.SYNDROME_MATCHED
    reasons[converged & early & (lp_iters > 0)] = StopReason.EARLY_STOPPED_THEN_LP
    traces = None
    if trace:
        traces = [row[row >= 0].tolist() for row in trace_buf]
    return BatchOutcome(e_hat, s_hat, converged, ms_iters, lp_iters, reasons, traces)


# ---------------------------------------------------------------------------
# single-syndrome entry points


def sb_ms_decode(s, graph: TannerGraph, config: DecoderConfig, priors,
                 trace: bool = False) -> tuple[DecodeOutcome, MsState]:
    """Min-sum decoding of one syndrome; also returns the final message state."""
    s = _as_syndrome(s, graph)
    lam = _priors(priors, graph, 1)[0]
    state = MsState.initial(graph, lam)
    counts: list[int] = []
    while (s != state.s_hat).any() and state.iteration < config.ims_max:
        state = ms_iteration(state, s, graph, config)
        counts.append(int(np.count_nonzero(s != state.s_hat)))
    converged = not (s != state.s_hat).any()
    outcome = DecodeOutcome(
        e_hat=state.e_hat,
        s_hat=state.s_hat,
        converged=converged,
        ms_iterations=state.iteration,
        lp_iterations=0,
        stop_reason=StopReason.SYNDROME_MATCHED if converged else StopReason.BUDGET_EXHAUSTED,
        trace=counts if trace else None,
    )
    return outcome, state


def sb_lp_decode(s, graph: TannerGraph, config: DecoderConfig, priors,
                 init_u_bar: np.ndarray | None = None, trace: bool = False) -> DecodeOutcome:
    return decode_batch("sb-lp", np.asarray(s)[None], graph, config, priors,
                        init_u_bar=init_u_bar, trace=trace)[0]


def combined_decode(s, graph: TannerGraph, config: DecoderConfig, priors,
                    trace: bool = False) -> DecodeOutcome:
    kind = "combined" if config.early_stop else "combined-no-early-stop"
    return decode_batch(kind, np.asarray(s)[None], graph, config, priors, trace=trace)[0]


def decode(kind: str, s, graph: TannerGraph, config: DecoderConfig, priors,
           trace: bool = False) -> DecodeOutcome:
    return decode_batch(kind, np.asarray(s)[None], graph, config, priors, trace=trace)[0]
