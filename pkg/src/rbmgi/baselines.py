"""Classical simulated annealing and path-integral simulated quantum annealing.

Both work on the same degree-pruned code as the RBM annealer and spend the
same budget: ``n_annealing`` schedule steps times ``n_sweep`` candidate
moves per step.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .encoding import MappingCode, PenaltyState, decode_mapping
from .graphs import verify_mapping
from .trace import IterationRecord, Isomorphic, NotFound, RunTrace


@dataclass
class SaConfig:
    t0: float = 100.0
    t_final: float = 0.667
    n_annealing: int = 500
    n_sweep: Optional[int] = None  # default 10 * L
    seed: int = 0

    def __post_init__(self):
        if not self.t0 > self.t_final > 0:
            raise ValueError("need t0 > t_final > 0")
        if self.n_annealing < 1 or (self.n_sweep is not None and self.n_sweep < 1):
            raise ValueError("schedule counts must be >= 1")


@dataclass
class SqaConfig:
    gamma0: float = 100.0
    gamma_final: float = 0.667
    tau: int = 4
    pt_temperature: Optional[float] = None  # default 1 / tau
    n_annealing: int = 500
    n_sweep: Optional[int] = None  # Monte Carlo steps per field value, default 10 * L
    seed: int = 0
    stop_at_zero: bool = False

    def __post_init__(self):
        if not self.gamma0 > self.gamma_final > 0:
            raise ValueError("need gamma0 > gamma_final > 0")
        if self.tau < 2:
            raise ValueError("need at least two Trotter slices")
        if self.pt_temperature is not None and self.pt_temperature <= 0:
            raise ValueError("pt_temperature must be positive")
        if self.n_annealing < 1 or (self.n_sweep is not None and self.n_sweep < 1):
            raise ValueError("schedule counts must be >= 1")

    @property
    def temperature(self) -> float:
        return 1.0 / self.tau if self.pt_temperature is None else self.pt_temperature


def temperature_at(cfg: SaConfig, k: int) -> float:
    """Geometric cooling from ``t0`` to ``t_final`` over ``n_annealing`` steps."""
    if not 0 <= k < cfg.n_annealing:
        raise IndexError(f"step {k} outside schedule of {cfg.n_annealing}")
    if k == 0:
        return cfg.t0
    if k == cfg.n_annealing - 1:
        return cfg.t_final
    return cfg.t0 * (cfg.t_final / cfg.t0) ** (k / (cfg.n_annealing - 1))


def field_at(cfg: SqaConfig, k: int) -> float:
    """Linear ramp of the transverse field from ``gamma0`` to ``gamma_final``."""
    if not 0 <= k < cfg.n_annealing:
        raise IndexError(f"step {k} outside schedule of {cfg.n_annealing}")
    if k == 0:
        return cfg.gamma0
    if k == cfg.n_annealing - 1:
        return cfg.gamma_final
    return cfg.gamma0 + (cfg.gamma_final - cfg.gamma0) * k / (cfg.n_annealing - 1)


def slice_coupling(gamma: float, tau: int, t_sim: float) -> float:
    """Ferromagnetic coupling between neighbouring Trotter slices."""
    if gamma <= 0 or t_sim <= 0 or tau < 1:
        raise ValueError("slice_coupling needs positive gamma, tau and temperature")
    pt = tau * t_sim
    x = gamma / pt
    # ln tanh x = ln(1 - e^-2x) - ln(1 + e^-2x); expm1 keeps small x exact,
    # log1p keeps the tiny coupling at large x from rounding to zero
    e = math.exp(-2.0 * x)
    head = math.log(-math.expm1(-2.0 * x)) if x < 0.5 else math.log1p(-e)
    ln_tanh = head - math.log1p(e)
    return -0.5 * pt * ln_tanh


def metropolis_probability(delta: float, temp: float) -> float:
    """Acceptance probability of a move that changes the energy by ``delta``."""
    return 1.0 if delta <= 0 else math.exp(-delta / temp)


def metropolis_sweep(state: PenaltyState, temp: float, ks, us, on_step=None) -> np.ndarray:
    """Single-bit-flip Metropolis moves at fixed temperature.

    ``ks`` are the proposed bits and ``us`` the matching uniforms. Returns
    the energy after every move; ``on_step`` is called after each accepted
    flip (used for best-state tracking).
    """
    energies = np.empty(len(ks))
    for t, (k, u) in enumerate(zip(ks, us)):
        de = state.delta(k)
        if u < metropolis_probability(de, temp):
            state.flip(k, de)
            if on_step is not None:
                on_step(state)
        energies[t] = state.energy
    return energies


def _finish(trace: RunTrace, code: MappingCode, x, best: int) -> RunTrace:
    x = np.asarray(x, dtype=np.int8)
    trace.best_config = x
    m = decode_mapping(code, x)
    if m.complete and verify_mapping(code.g1, code.g2, m):
        trace.verdict = Isomorphic(m)
        trace.final_hit_rate = 1.0
    else:
        trace.verdict = NotFound(best)
        trace.final_hit_rate = 0.0
    return trace


def run_sa(code: MappingCode, cfg: Optional[SaConfig] = None) -> RunTrace:
    """Single-bit-flip Metropolis annealing; returns the best state ever seen."""
    cfg = cfg or SaConfig()
    L = code.L
    n_sweep = cfg.n_sweep or 10 * L
    rng = np.random.default_rng(cfg.seed)
    state = PenaltyState(code, rng.integers(0, 2, size=L))
    best = state.energy
    best_x = state.x.copy()
    trace = RunTrace(backend="sa", n_qubits=L)

    def track(st: PenaltyState) -> None:
        nonlocal best, best_x
        if st.energy < best:
            best = st.energy
            best_x = st.x.copy()

    for step in range(cfg.n_annealing):
        t_start = time.perf_counter()
        temp = temperature_at(cfg, step)
        ks = rng.integers(L, size=n_sweep).tolist()
        us = rng.random(n_sweep).tolist()
        energies = metropolis_sweep(state, temp, ks, us, track)
        trace.records.append(
            IterationRecord(
                iteration=step,
                mean_energy=float(energies.mean()),
                variance=float(energies.var()),
                best_energy=int(best),
                hit_rate=float((energies == 0).mean()),
                wall_time=time.perf_counter() - t_start,
                min_energy=int(energies.min()),
            )
        )
        trace.proposals += n_sweep
    return _finish(trace, code, best_x, int(best))


class SliceSystem:
    """``tau`` coupled replicas of the spin configuration, periodic in imaginary time.

    Effective energy::

        E = sum_k penalty(s^k) - J * sum_k sum_i s_i^k s_i^(k+1),   s^(tau) = s^(0)
    """

    def __init__(self, code: MappingCode, spins, coupling: float = 0.0):
        spins = np.array(spins, dtype=np.int64, ndmin=2)
        self.code = code
        self.tau = spins.shape[0]
        self.spins = spins
        self.slices = [PenaltyState(code, (row + 1) // 2) for row in spins]
        self.coupling = coupling

    def slice_energies(self) -> list:
        return [st.energy for st in self.slices]

    def inter_slice_sum(self) -> int:
        s = self.spins
        return int((s * np.roll(s, -1, axis=0)).sum())

    def effective_energy(self) -> float:
        return float(sum(self.slice_energies())) - self.coupling * self.inter_slice_sum()

    def local_delta(self, k: int, i: int) -> float:
        s = self.spins
        nb = s[(k - 1) % self.tau, i] + s[(k + 1) % self.tau, i]
        return self.slices[k].delta(i) + 2.0 * self.coupling * s[k, i] * nb

    def global_delta(self, i: int) -> float:
        # inter-slice products are invariant when a whole column flips
        return float(sum(st.delta(i) for st in self.slices))

    def flip_local(self, k: int, i: int) -> None:
        self.slices[k].flip(i)
        self.spins[k, i] = -self.spins[k, i]

    def flip_global(self, i: int) -> None:
        for st in self.slices:
            st.flip(i)
        self.spins[:, i] = -self.spins[:, i]

    def best_slice(self) -> int:
        """Lowest-energy slice, ties to the lowest index."""
        return int(np.argmin(self.slice_energies()))


def run_pimc_sqa(code: MappingCode, cfg: Optional[SqaConfig] = None) -> RunTrace:
    """Path-integral SQA: each Monte Carlo step is one local and one global move.

    Moves are accepted with the Metropolis rule at the replica temperature
    ``tau * T``, the temperature at which the slice coupling is defined.
    The answer is the lowest-energy slice at the end of the schedule.
    """
    cfg = cfg or SqaConfig()
    L, tau = code.L, cfg.tau
    n_sweep = cfg.n_sweep or 10 * L
    rng = np.random.default_rng(cfg.seed)
    system = SliceSystem(code, 2 * rng.integers(0, 2, size=(tau, L)) - 1)
    pt = tau * cfg.temperature
    trace = RunTrace(backend="sqa", n_qubits=L)
    best = min(system.slice_energies())
    mins = np.empty(n_sweep)
    for step in range(cfg.n_annealing):
        t_start = time.perf_counter()
        system.coupling = slice_coupling(field_at(cfg, step), tau, cfg.temperature)
        ks = rng.integers(tau, size=n_sweep).tolist()
        ls = rng.integers(L, size=n_sweep).tolist()
        gs = rng.integers(L, size=n_sweep).tolist()
        u1 = rng.random(n_sweep).tolist()
        u2 = rng.random(n_sweep).tolist()
        for t in range(n_sweep):
            k, i = ks[t], ls[t]
            de = system.local_delta(k, i)
            if u1[t] < metropolis_probability(de, pt):
                system.flip_local(k, i)
            i = gs[t]
            de = system.global_delta(i)
            if u2[t] < metropolis_probability(de, pt):
                system.flip_global(i)
            mins[t] = min(st.energy for st in system.slices)
        cur = int(mins.min())
        best = min(best, cur)
        trace.records.append(
            IterationRecord(
                iteration=step,
                mean_energy=float(mins.mean()),
                variance=float(mins.var()),
                best_energy=int(best),
                hit_rate=float((mins == 0).mean()),
                wall_time=time.perf_counter() - t_start,
                min_energy=cur,
            )
        )
        trace.proposals += n_sweep
        if cfg.stop_at_zero and min(system.slice_energies()) == 0:
            break
    trace.model = system
    k = system.best_slice()
    return _finish(trace, code, system.slices[k].x, int(best))
