"""Variational Monte Carlo annealer over the RBM wavefunction.

Each iteration samples the current |psi|^2, scores the samples with the
diagonal penalty Hamiltonian (local energy = penalty of the sample), and
takes one stochastic-reconfiguration step. The run stops when the sampled
energy has zero variance at zero mean (ground state reached) or sits on a
stable integer floor >= 1, or when the iteration budget runs out.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .encoding import (
    MappingCode,
    NonIsomorphicVerdict,
    batch_penalty,
    build_code,
    decode_mapping,
    spins_to_bits,
)
from .graphs import Graph, verify_mapping
from .rbm import RbmParams, apply_update, init_params, log_derivatives
from .sampler import MarkovChains, sample_batch
from .trace import IterationRecord, Isomorphic, NotFound, NotIsomorphic, RunTrace


@dataclass
class VmcConfig:
    n_iterations: int = 500
    samples_per_iter: Optional[int] = None  # default 10 * L
    learning_rate: float = 0.05
    sr_epsilon: float = 0.1
    sr_relative: bool = True  # scale the shift by the mean diagonal of S
    convergence_window: int = 10
    seed: int = 0
    alpha: float = 1.0
    sigma: float = 0.01
    n_chains: Optional[int] = None  # default: one chain per sample
    thin: Optional[int] = None  # default L
    burn_in: Optional[int] = None  # default 10 * L, first iteration only
    early_stop: bool = False

    def __post_init__(self):
        if self.n_iterations < 1 or self.convergence_window < 1:
            raise ValueError("iteration counts must be >= 1")
        if self.samples_per_iter is not None and self.samples_per_iter < 1:
            raise ValueError("samples_per_iter must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.sr_epsilon < 0:
            raise ValueError("sr_epsilon must be nonnegative")

    def resolved(self, L: int) -> dict:
        n = self.samples_per_iter or 10 * L
        return dict(
            n_samples=n,
            n_hidden=max(1, int(round(self.alpha * L))),
            n_chains=min(self.n_chains or n, n),
            thin=L if self.thin is None else self.thin,
            burn_in=10 * L if self.burn_in is None else self.burn_in,
        )


@dataclass(frozen=True)
class EnergyStats:
    mean: float
    variance: float
    min_energy: int
    hit_count: int
    n: int

    @property
    def hit_rate(self) -> float:
        return self.hit_count / self.n


def local_energy(code: MappingCode, s) -> int | np.ndarray:
    """Penalty of the spin configuration(s); the Hamiltonian is diagonal."""
    s = np.asarray(s)
    e = batch_penalty(code, spins_to_bits(s))
    return int(e[0]) if s.ndim == 1 else e


def batch_stats(code: MappingCode, samples) -> EnergyStats:
    samples = np.atleast_2d(samples)
    if samples.shape[0] == 0:
        raise ValueError("empty sample batch")
    e = local_energy(code, samples)
    return energy_stats(e)


def energy_stats(e: np.ndarray) -> EnergyStats:
    return EnergyStats(
        mean=float(e.mean()),
        variance=float(e.var()),
        min_energy=int(e.min()),
        hit_count=int((e == 0).sum()),
        n=int(e.size),
    )


def sr_update(
    p: RbmParams,
    samples,
    code: MappingCode,
    cfg: VmcConfig,
    energies: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Stochastic-reconfiguration step ``-lr * (S + eps I)^-1 F``.

    ``F`` is the energy/log-derivative covariance and ``S`` the
    log-derivative covariance over the batch. When the batch is smaller than
    the parameter count the same system is solved through its sample-space
    form ``delta = -lr * Oc^T (Oc Oc^T / m + eps I)^-1 (E - <E>) / m``,
    which is exact, not an approximation.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    m = samples.shape[0]
    if m < 2:
        raise ValueError("sr_update needs at least two samples")
    e = local_energy(code, samples) if energies is None else np.asarray(energies)
    e = e.astype(np.float64)
    r = e - e.mean()
    if not r.any():
        return np.zeros(p.n_params)
    try:
        if p.n_params <= m:
            o = log_derivatives(p, samples)
            oc = o - o.mean(axis=0)
            s = oc.T @ oc / m
            s[np.diag_indices_from(s)] += _shift(cfg, np.trace(s) / p.n_params)
            delta = -cfg.learning_rate * _solve_pos(s, oc.T @ r / m)
        else:
            # The weight derivatives are outer products s_i * tanh(theta_j), so
            # the Gram matrix of the full derivative rows factorizes and the
            # m x (L*H) derivative matrix is never formed.
            t = np.tanh(p.b + samples @ p.w)
            ss, tt = samples @ samples.T, t @ t.T
            k = ss + tt + ss * tt
            k -= k.mean(axis=0)
            k -= k.mean(axis=1)[:, None]
            k /= m
            shift = _shift(cfg, np.trace(k) / p.n_params)
            if shift <= 0:
                # centring puts the all-ones vector in the null space of k
                raise np.linalg.LinAlgError("sample-space system is singular without a shift")
            k[np.diag_indices_from(k)] += shift
            y = _solve_pos(k, r / m)
            yc = y - y.mean()
            grad_w = samples.T @ (yc[:, None] * t)
            delta = -cfg.learning_rate * np.concatenate([samples.T @ yc, t.T @ yc, grad_w.ravel()])
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise FloatingPointError(f"SR system is singular: {exc}") from exc
    if not np.isfinite(delta).all():
        raise FloatingPointError("non-finite SR update")
    return delta


def _shift(cfg: VmcConfig, mean_diag: float) -> float:
    return cfg.sr_epsilon * mean_diag if cfg.sr_relative else cfg.sr_epsilon


def _solve_pos(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    c = scipy.linalg.cho_factor(a, check_finite=False)
    return scipy.linalg.cho_solve(c, b, check_finite=False)


def converged(records: Sequence[IterationRecord], cfg: VmcConfig) -> bool:
    """Zero-variance ground state, or a stable integer energy floor >= 1."""
    w = cfg.convergence_window
    if len(records) < w:
        return False
    window = records[-w:]
    if all(r.variance == 0 and r.mean_energy == 0 for r in window):
        return True
    floor = window[0].min_energy
    return floor >= 1 and all(
        r.min_energy == floor and abs(r.mean_energy - floor) <= 0.5 for r in window
    )


def verified_hit(code: MappingCode, x) -> Optional[Isomorphic]:
    m = decode_mapping(code, x)
    if m.complete and verify_mapping(code.g1, code.g2, m):
        return Isomorphic(m)
    return None


def run_vmc(code: MappingCode, cfg: VmcConfig) -> RunTrace:
    """Sample / score / SR-update loop on an existing code."""
    L = code.L
    res = cfg.resolved(L)
    n = res["n_samples"]
    trace = RunTrace(backend="rbm", n_qubits=L)
    params = init_params(L, res["n_hidden"], cfg.sigma, cfg.seed)
    chains = MarkovChains.random(params, res["n_chains"], [cfg.seed, 1])
    best = None
    best_x = None
    verdict = None
    for it in range(cfg.n_iterations):
        t0 = time.perf_counter()
        samples = sample_batch(chains, params, n, res["thin"], res["burn_in"] if it == 0 else 0)
        e = local_energy(code, samples)
        st = energy_stats(e)
        k = int(np.argmin(e))
        if best is None or st.min_energy < best:
            best = st.min_energy
            best_x = spins_to_bits(samples[k])
        if st.hit_count and verdict is None:
            verdict = verified_hit(code, spins_to_bits(samples[k]))
        stop = converged(trace.records + [_record(it, st, best, 0.0)], cfg)
        if not stop and not (cfg.early_stop and verdict is not None):
            if n >= 2:
                params = apply_update(params, sr_update(params, samples, code, cfg, e))
                chains.refresh(params)
        trace.records.append(_record(it, st, best, time.perf_counter() - t0))
        trace.proposals += n
        if stop:
            trace.converged = True
            break
        if cfg.early_stop and verdict is not None:
            break
    # the final hit rate is that of the last recorded batch
    last = trace.records[-1]
    trace.final_hit_rate = last.hit_rate
    trace.verdict = verdict if verdict is not None else NotFound(best)
    trace.best_config = best_x
    trace.model = params
    return trace


def _record(it: int, st: EnergyStats, best: int, dt: float) -> IterationRecord:
    return IterationRecord(
        iteration=it,
        mean_energy=st.mean,
        variance=st.variance,
        best_energy=best,
        hit_rate=st.hit_rate,
        wall_time=dt,
        min_energy=st.min_energy,
    )


def run_rbm_sqa(g1: Graph, g2: Graph, cfg: Optional[VmcConfig] = None) -> RunTrace:
    """Full pipeline: encode, prune, then anneal with the RBM state."""
    cfg = cfg or VmcConfig()
    code = build_code(g1, g2)
    if isinstance(code, NonIsomorphicVerdict):
        return RunTrace(backend="rbm", verdict=NotIsomorphic(code.reason))
    return run_vmc(code, cfg)
