"""Metropolis warm-up, independence MH step, and the adaptive driver.

The driver runs in two phases.  A component-wise random-walk Metropolis
warm-up discards `burn_in` sweeps and keeps `initial_pool` states, from
which the first Student-t proposal is fitted.  The main phase is an
independence Metropolis-Hastings chain; every `update_interval` draws the
proposal's (M, Sigma) are re-fitted from all samples accumulated so far
(pool included) so the proposal tracks the posterior it is feeding.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import model
from .errors import DomainError, InsufficientDataError
from .proposal import StudentTProposal, build_proposal, estimate_moments

log = logging.getLogger(__name__)

LogTarget = Callable[[np.ndarray], float]


@dataclass
class ChainConfig:
    """Run schedule and tuning knobs for `run_adaptive`."""

    kind: model.ModelKind = model.ModelKind.QGARCH
    burn_in: int = 5000
    initial_pool: int = 1000
    update_interval: int = 1000
    total_samples: int = 100_000
    nu: float = 10.0
    seed: int = 0
    theta0: model.ModelParams | None = None
    sigma1_sq: float | None = None
    freeze_after: int | None = None
    warmup_step: float = 0.01
    warmup_adapt_interval: int = 200

    def __post_init__(self):
        for name in ("burn_in", "initial_pool", "update_interval", "total_samples"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.nu > 2.0:
            raise DomainError(f"nu must exceed 2, got {self.nu}")
        if self.theta0 is not None and self.theta0.kind is not self.kind:
            raise DomainError("theta0 model kind does not match config kind")


@dataclass
class MomentSnapshot:
    """Moment estimate at a point in Monte Carlo time.

    `proposal_sigma` is the scale matrix of the proposal in effect after
    this point (the frozen one if adaptation has stopped).
    """

    t: int
    mean: np.ndarray
    second_central: np.ndarray
    proposal_sigma: np.ndarray


@dataclass
class ChainResult:
    """Draws and traces from one adaptive run."""

    samples: np.ndarray
    param_names: tuple[str, ...]
    acceptance_trace: np.ndarray
    moment_trace: list[MomentSnapshot]
    warmup_samples: np.ndarray


class MHStep(NamedTuple):
    """Outcome of one MH transition, with the state's cached log densities."""

    theta: np.ndarray
    accepted: bool
    log_target: float
    log_proposal: float


def metropolis_warmup(
    target: LogTarget,
    theta0: Sequence[float],
    n_keep: int,
    n_discard: int,
    rng: np.random.Generator,
    *,
    step: float = 0.01,
    adapt_interval: int = 200,
) -> np.ndarray:
    """Component-wise random-walk Metropolis chain.

    Each sweep perturbs one component at a time with a Gaussian step and
    applies the symmetric-proposal accept rule min(1, P'/P).  During the
    discarded sweeps each component's step is doubled (halved) every
    `adapt_interval` sweeps when its acceptance runs above 60% (below
    40%), steering toward roughly 50%; steps are frozen afterwards.

    Returns the `n_keep` states following the `n_discard` discarded ones,
    as an (n_keep, p) array.
    """
    x = np.asarray(theta0, dtype=float).copy()
    p = x.size
    lp = target(x)
    if not math.isfinite(lp):
        raise DomainError(f"warm-up start has non-finite target: {theta0}")
    steps = np.full(p, float(step))
    kept = np.empty((n_keep, p))
    accepts = np.zeros(p, dtype=int)
    for sweep in range(n_discard + n_keep):
        for j in range(p):
            proposed = x.copy()
            proposed[j] += steps[j] * rng.standard_normal()
            lp_new = target(proposed)
            delta = lp_new - lp
            if delta >= 0.0 or rng.random() < math.exp(delta):
                x = proposed
                lp = lp_new
                accepts[j] += 1
        if sweep < n_discard and (sweep + 1) % adapt_interval == 0:
            rate = accepts / adapt_interval
            steps[rate > 0.6] *= 2.0
            steps[rate < 0.4] *= 0.5
            accepts[:] = 0
        if sweep >= n_discard:
            kept[sweep - n_discard] = x
    return kept


def mh_step(
    target: LogTarget,
    proposal: StudentTProposal,
    current: np.ndarray,
    rng: np.random.Generator,
    *,
    current_log_target: float | None = None,
    current_log_proposal: float | None = None,
) -> MHStep:
    """One independence Metropolis-Hastings transition.

    The candidate is drawn from the proposal regardless of the current
    state, so the accept probability is

        min[1, P(theta') / P(theta) * g(theta) / g(theta')].

    A candidate with -inf target is always rejected.  Passing the cached
    log densities of the current state avoids re-evaluating them.
    """
    lt_cur = target(current) if current_log_target is None else current_log_target
    lg_cur = proposal.log_density(current) if current_log_proposal is None else current_log_proposal
    candidate = proposal.draw(rng)
    lt_new = target(candidate)
    if lt_new == -math.inf:
        return MHStep(current, False, lt_cur, lg_cur)
    lg_new = proposal.log_density(candidate)
    log_accept = (lt_new - lt_cur) + (lg_cur - lg_new)
    if log_accept >= 0.0 or rng.random() < math.exp(log_accept):
        return MHStep(candidate, True, lt_new, lg_new)
    return MHStep(current, False, lt_cur, lg_cur)


def default_theta0(returns, kind: model.ModelKind) -> model.ModelParams:
    """Interior starting point scaled to the data's variance."""
    variance = float(np.var(np.asarray(returns.values, dtype=float)))
    return model.ModelParams(max(0.1 * variance, 1e-12), 0.1, 0.8, 0.0, kind)


def run_adaptive(config: ChainConfig, returns) -> ChainResult:
    """Full adaptive run against a return series.

    Warm-up, proposal fit, then `total_samples` independence-MH draws with
    the proposal re-fitted every `update_interval` draws from the pool
    plus all adaptive-phase samples (or until `freeze_after` draws, after
    which the proposal stays fixed).  Per-window acceptance fractions and
    per-update moment snapshots are recorded.
    """
    if len(returns) < 1:
        raise InsufficientDataError("empty return series")
    params0 = config.theta0 if config.theta0 is not None else default_theta0(returns, config.kind)
    target = model.log_posterior_fn(returns, config.kind, config.sigma1_sq)
    names = params0.param_names
    p = len(names)

    warm_seed, mh_seed = np.random.SeedSequence(config.seed).spawn(2)
    pool = metropolis_warmup(
        target,
        params0.as_vector(),
        config.initial_pool,
        config.burn_in,
        np.random.default_rng(warm_seed),
        step=config.warmup_step,
        adapt_interval=config.warmup_adapt_interval,
    )

    # Pool and adaptive draws share one buffer so each re-fit sees all
    # accumulated data without copying.
    n_pool, total, interval = config.initial_pool, config.total_samples, config.update_interval
    store = np.empty((n_pool + total, p))
    store[:n_pool] = pool

    moments = estimate_moments(store[:n_pool])
    proposal = build_proposal(moments, config.nu)
    trace = [MomentSnapshot(0, moments.mean, moments.second_central, proposal.sigma)]

    rng = np.random.default_rng(mh_seed)
    x = pool[-1].copy()
    lt = target(x)
    lg = proposal.log_density(x)
    acceptance: list[float] = []
    window_accepts = 0
    n_windows = math.ceil(total / interval)

    for i in range(1, total + 1):
        x, accepted, lt, lg = mh_step(
            target, proposal, x, rng, current_log_target=lt, current_log_proposal=lg
        )
        store[n_pool + i - 1] = x
        window_accepts += accepted
        if i % interval == 0 or i == total:
            window_size = interval if i % interval == 0 else i % interval
            acceptance.append(window_accepts / window_size)
            window_accepts = 0
            moments = estimate_moments(store[: n_pool + i])
            frozen = config.freeze_after is not None and i >= config.freeze_after
            if not frozen:
                proposal = build_proposal(moments, config.nu)
                lg = proposal.log_density(x)
            trace.append(MomentSnapshot(i, moments.mean, moments.second_central, proposal.sigma))
            log.info(
                "window %d/%d  acceptance %.3f%s",
                len(acceptance),
                n_windows,
                acceptance[-1],
                "  (proposal frozen)" if frozen else "",
            )

    return ChainResult(
        samples=store[n_pool:],
        param_names=names,
        acceptance_trace=np.asarray(acceptance),
        moment_trace=trace,
        warmup_samples=store[:n_pool],
    )
