"""Monte Carlo engine for broadcast gossip trials.

A trial starts from an initial value vector (companions at zero), applies
uniformly random broadcasts, and declares convergence at the first
iteration where the stacked state moves less than `threshold` in
Euclidean norm.  That statistic equals the successive difference of the
error vector relative to the eventual consensus, since the two differ by
a constant along a trial; the engine computes it from the entries a
broadcast actually touches.

Two error metrics are tracked against the initial average mu0 = mean(x0)
and the running mean:

    r(t) = mean((x(t) - mu0)^2)        distance from the true average
    q(t) = mean((x(t) - mean(x(t)))^2) spread around the current mean

Storage is dense up to 10^4 iterations, then geometrically thinned; the
stopping rule itself always runs at the configured stride regardless of
what is stored.  Trials are reproducible: trial i of a campaign uses
generator seed base_seed + i for both its initial values and its
broadcast sequence, so results do not depend on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import GossipLabError, MassConservationError, MissingCoords
from .graph import DiGraph
from .protocol import ParamScheme, SchemeKind, build_scheme

FULL_RECORD_LIMIT = 10_000   # record every iteration up to here
THIN_FACTOR = 1.05           # then sample on a geometric grid
MASS_RTOL = 1e-9
THREADS_ENV = "GOSSIPLAB_THREADS"


class InitKind(Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    SPIKE = "spike"
    SLOPE = "slope"


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one trial.

    converged_at is None when max_iters ran out.  The series arrays share
    one index: entry m holds r and q at iteration t_series[m]; they are
    subsampled past FULL_RECORD_LIMIT unless the trial ran with
    full_series, in which case stat_series additionally holds the
    engine's stopping statistic for every iteration from t=1 on.
    r_final and q_final always refer to the last iteration executed, even
    when the series have been stripped to save memory.
    """

    converged_at: int | None
    consensus_value: float
    r_final: float
    q_final: float
    t_series: np.ndarray
    r_series: np.ndarray
    q_series: np.ndarray
    seed: int | None = None
    predicted: float | None = None
    stat_series: np.ndarray | None = None


@dataclass(frozen=True)
class MonteCarloResult:
    """Campaign aggregate.  Broadcast counts use converged_at, with
    max_iters standing in for trials that never converged."""

    records: tuple
    failures: tuple
    mean_broadcasts: float
    median_broadcasts: float
    mean_r_final: float
    mean_q_final: float
    trials: int


@dataclass(frozen=True)
class SweepPoint:
    epsilon: float
    result: MonteCarloResult

    @property
    def mean_broadcasts(self) -> float:
        return self.result.mean_broadcasts


def resolve_workers(requested: int | None = None) -> int:
    """Worker count clamped by the GOSSIPLAB_THREADS environment variable."""
    w = 1 if requested is None else max(1, int(requested))
    cap = os.environ.get(THREADS_ENV)
    if cap is not None:
        try:
            w = min(w, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}")
    return w


def init_values(kind: InitKind, g: DiGraph, rng: np.random.Generator) -> np.ndarray:
    """Draw an initial value vector for the nodes of g."""
    if isinstance(kind, str):
        kind = InitKind(kind.lower())
    n = g.n
    if kind is InitKind.UNIFORM:
        return rng.random(n)
    if kind is InitKind.GAUSSIAN:
        return rng.standard_normal(n)
    if kind is InitKind.SPIKE:
        x = np.zeros(n)
        x[int(rng.integers(n))] = 1.0
        return x
    if g.coords is None:
        raise MissingCoords("slope initialization needs node coordinates")
    return g.coords[:, 0] + g.coords[:, 1]


def run_trial(scheme: ParamScheme, x0, threshold: float, max_iters: int,
              rng: np.random.Generator, *, stride: int = 1,
              full_series: bool = False, predicted: float | None = None,
              seed: int | None = None, stop_rule: str = "change") -> TrialRecord:
    """Run one trial until the stacked state settles or max_iters is hit.

    The default stopping rule fires at the first iteration (multiple of
    `stride`) whose state change has norm at most `threshold`; a stride
    above 1 can only delay the declaration, never produce a spurious one.
    stop_rule="spread" stops on q(t) <= threshold instead, which is the
    meaningful criterion for localized initializations (a spike leaves
    most broadcasts changing nothing at all, so any state-change
    threshold fires vacuously at t=1).  For sum-preserving schemes the
    engine recomputes the total of values plus companions every iteration
    and raises MassConservationError on relative drift beyond 1e-9.
    """
    if stop_rule not in ("change", "spread"):
        raise ValueError("stop_rule must be 'change' or 'spread'")
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if stride < 1:
        raise ValueError("stride must be at least 1")
    n = scheme.n
    x = np.array(x0, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"x0 must be a length-{n} vector")
    y = np.zeros(n)
    eps = scheme.epsilon

    # per-broadcaster constants; arithmetic mirrors protocol.local_update
    # so a replayed trial reproduces the states bit for bit
    recv_list = scheme.receivers
    one_minus_a = [1.0 - scheme.a[r, k] for k, r in enumerate(recv_list)]
    a_cols = [np.ascontiguousarray(scheme.a[r, k]) for k, r in enumerate(recv_list)]
    b_cols = [np.ascontiguousarray(scheme.b[r, k]) for k, r in enumerate(recv_list)]
    ed_cols = [eps * scheme.d[r, k] for k, r in enumerate(recv_list)]
    one_minus_ed = [1.0 - c for c in ed_cols]

    mu0 = float(x.mean())
    check_mass = scheme.kind.is_unbiased
    total0 = float(x.sum())
    mass_tol = MASS_RTOL * max(1.0, abs(total0))

    ts = [0]
    rs = [float(np.mean((x - mu0) ** 2))]
    qs = [float(np.var(x))]
    stats = [] if full_series else None
    next_thin = int(math.ceil(FULL_RECORD_LIMIT * THIN_FACTOR))

    integers = rng.integers
    converged_at = None
    t = 0
    while t < max_iters:
        t += 1
        k = int(integers(1, n + 1)) - 1
        yk = y[k]
        recv = recv_list[k]
        if recv.size:
            xr = x[recv]
            yr = y[recv]
            xk = x[k]
            new_x = one_minus_a[k] * xr + a_cols[k] * xk + ed_cols[k] * yr
            new_y = a_cols[k] * (xr - xk) + one_minus_ed[k] * yr + b_cols[k] * yk
            dx = new_x - xr
            dy = new_y - yr
            x[recv] = new_x
            y[recv] = new_y
            delta2 = float(dx @ dx) + float(dy @ dy) + yk * yk
        else:
            delta2 = yk * yk
        y[k] = 0.0

        if check_mass:
            drift = abs((float(x.sum()) + float(y.sum())) - total0)
            if drift > mass_tol:
                raise MassConservationError(
                    f"mass drifted by {drift:.3e} at iteration {t}")

        stat = math.sqrt(delta2)
        if full_series:
            stats.append(stat)
        if t % stride != 0:
            hit = False
        elif stop_rule == "spread":
            hit = float(np.var(x)) <= threshold
        else:
            hit = stat <= threshold
        done = hit or t == max_iters

        if full_series or t <= FULL_RECORD_LIMIT or t >= next_thin or done:
            if t >= next_thin:
                while next_thin <= t:
                    next_thin = max(next_thin + 1, int(next_thin * THIN_FACTOR))
            ts.append(t)
            rs.append(float(np.mean((x - mu0) ** 2)))
            qs.append(float(np.var(x)))
        if done:
            if hit:
                converged_at = t
            break

    return TrialRecord(
        converged_at=converged_at,
        consensus_value=float(x.mean()),
        r_final=rs[-1],
        q_final=qs[-1],
        t_series=np.asarray(ts, dtype=np.int64),
        r_series=np.asarray(rs),
        q_series=np.asarray(qs),
        seed=seed,
        predicted=predicted,
        stat_series=None if stats is None else np.asarray(stats),
    )


def _single_trial(scheme, g, init, threshold, max_iters, seed, keep_series,
                  full_series, w1, stride, stop_rule):
    rng = np.random.default_rng(seed)
    x0 = init_values(init, g, rng)
    predicted = None if w1 is None else float(np.asarray(w1) @ x0)
    rec = run_trial(scheme, x0, threshold, max_iters, rng, stride=stride,
                    full_series=full_series, predicted=predicted, seed=seed,
                    stop_rule=stop_rule)
    if not keep_series:
        empty = np.empty(0)
        rec = replace(rec, t_series=np.empty(0, dtype=np.int64),
                      r_series=empty, q_series=empty, stat_series=None)
    return rec


def _trial_worker(payload):
    idx, args = payload
    try:
        return idx, _single_trial(*args), None
    except GossipLabError as exc:
        return idx, None, f"{type(exc).__name__}: {exc}"


def monte_carlo(scheme: ParamScheme, g: DiGraph, init, trials: int,
                threshold: float, max_iters: int, base_seed: int, *,
                workers: int | None = None, keep_series: bool = True,
                full_series: bool = False, w1=None, stride: int = 1,
                stop_rule: str = "change") -> MonteCarloResult:
    """Run `trials` independent trials with seeds base_seed + i.

    Aggregates are computed over successful trials; engine-level failures
    (for example a mass-conservation violation) are collected per trial
    instead of aborting the campaign.  Passing w1 attaches the predicted
    consensus w1 . x0 to every record.  keep_series=False strips the
    stored series to keep large campaigns small; the finals survive.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if isinstance(init, str):
        init = InitKind(init.lower())
    args = [(scheme, g, init, threshold, max_iters, base_seed + i,
             keep_series, full_series, w1, stride, stop_rule)
            for i in range(trials)]
    nwork = resolve_workers(workers)
    results = [None] * trials
    failures = []
    if nwork > 1 and trials > 1:
        payloads = list(enumerate(args))
        chunk = max(1, trials // (4 * nwork))
        with ProcessPoolExecutor(max_workers=nwork) as pool:
            for idx, rec, err in pool.map(_trial_worker, payloads, chunksize=chunk):
                results[idx] = rec
                if err is not None:
                    failures.append((idx, err))
    else:
        for i, a in enumerate(args):
            try:
                results[i] = _single_trial(*a)
            except GossipLabError as exc:
                failures.append((i, f"{type(exc).__name__}: {exc}"))
    records = tuple(r for r in results if r is not None)
    if records:
        counts = np.array([
            r.converged_at if r.converged_at is not None else max_iters
            for r in records], dtype=float)
        mean_b = float(counts.mean())
        median_b = float(np.median(counts))
        mean_r = float(np.mean([r.r_final for r in records]))
        mean_q = float(np.mean([r.q_final for r in records]))
    else:
        mean_b = median_b = mean_r = mean_q = float("nan")
    return MonteCarloResult(
        records=records,
        failures=tuple(failures),
        mean_broadcasts=mean_b,
        median_broadcasts=median_b,
        mean_r_final=mean_r,
        mean_q_final=mean_q,
        trials=trials,
    )


def _sweep_worker(payload):
    (eps, kind, g, init, trials, threshold, max_iters, base_seed, gamma,
     stride, stop_rule) = payload
    scheme = build_scheme(kind, g, eps, gamma)
    result = monte_carlo(scheme, g, init, trials, threshold, max_iters,
                         base_seed, workers=1, keep_series=False, stride=stride,
                         stop_rule=stop_rule)
    return SweepPoint(epsilon=eps, result=result)


def epsilon_sweep(kind: SchemeKind, g: DiGraph, grid, trials: int,
                  threshold: float, max_iters: int, base_seed: int, *,
                  gamma: float = 0.5, init=InitKind.UNIFORM,
                  workers: int | None = None, stride: int = 1,
                  stop_rule: str = "change") -> list:
    """One Monte Carlo campaign per coupling strength on `grid`.

    Every grid point reuses the same base_seed, so trial i sees the same
    initial values and broadcast order at every epsilon; the sweep curve
    is then a paired comparison rather than independent noise.
    """
    if isinstance(init, str):
        init = InitKind(init.lower())
    grid = [float(e) for e in grid]
    if not grid:
        raise ValueError("empty epsilon grid")
    for eps in grid:
        build_scheme(kind, g, eps, gamma)   # validate the whole grid up front
    payloads = [(eps, kind, g, init, trials, threshold, max_iters,
                 base_seed, gamma, stride, stop_rule) for eps in grid]
    nwork = resolve_workers(workers)
    if nwork > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=nwork) as pool:
            points = list(pool.map(_sweep_worker, payloads))
    else:
        points = [_sweep_worker(p) for p in payloads]
    return points


def first_crossing(record: TrialRecord, level: float) -> int | None:
    """First recorded iteration with q at or below `level`."""
    idx = np.flatnonzero(record.q_series <= level)
    if idx.size == 0:
        return None
    return int(record.t_series[idx[0]])


def aggregate_series(records) -> tuple:
    """Mean r and q curves on the union of the records' iteration grids.

    Between recorded points a trial contributes its most recent value
    (step interpolation), which is exact on the dense prefix and a
    controlled 5 percent-resolution approximation on the thinned tail.
    """
    records = [r for r in records if r.t_series.size]
    if not records:
        raise ValueError("no records with stored series")
    grid = np.unique(np.concatenate([r.t_series for r in records]))
    mean_r = np.zeros(grid.size)
    mean_q = np.zeros(grid.size)
    for rec in records:
        pos = np.searchsorted(rec.t_series, grid, side="right") - 1
        pos = np.clip(pos, 0, rec.t_series.size - 1)
        mean_r += rec.r_series[pos]
        mean_q += rec.q_series[pos]
    mean_r /= len(records)
    mean_q /= len(records)
    return grid, mean_r, mean_q


# ---- CSV emission (17 significant digits throughout) ----

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def sweep_csv(points, analytic=None) -> str:
    """Sweep curve; optional per-point analytic second-largest modulus
    appends an `analytic_lambda2` column."""
    cols = "epsilon,mean_broadcasts,median_broadcasts,mean_q_final,mean_r_final,trials"
    if analytic is not None:
        if len(analytic) != len(points):
            raise ValueError("analytic column length mismatch")
        cols += ",analytic_lambda2"
    lines = [cols]
    for i, pt in enumerate(points):
        res = pt.result
        row = [_fmt(pt.epsilon), _fmt(res.mean_broadcasts),
               _fmt(res.median_broadcasts), _fmt(res.mean_q_final),
               _fmt(res.mean_r_final), str(res.trials)]
        if analytic is not None:
            row.append(_fmt(analytic[i]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def trial_csv(record: TrialRecord) -> str:
    lines = ["t,r,q"]
    for t, r, q in zip(record.t_series, record.r_series, record.q_series):
        lines.append(f"{int(t)},{_fmt(r)},{_fmt(q)}")
    return "\n".join(lines) + "\n"


def aggregate_csv(records) -> str:
    grid, mean_r, mean_q = aggregate_series(records)
    lines = ["t,mean_r,mean_q"]
    for t, r, q in zip(grid, mean_r, mean_q):
        lines.append(f"{int(t)},{_fmt(r)},{_fmt(q)}")
    return "\n".join(lines) + "\n"


def write_text(path, text: str, header_lines=()) -> None:
    with open(path, "w") as f:
        for ln in header_lines:
            f.write(f"# {ln}\n")
        f.write(text)
