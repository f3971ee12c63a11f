"""Metropolis-Hastings sampling of |psi|^2 with single-site flip proposals.

Independent chains are advanced in lockstep with numpy; each chain draws its
proposals and uniforms from its own generator, spawned from the master seed
by chain index, so results do not depend on how many chains share a block.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .rbm import RbmParams, log_cosh


class MarkovChains:
    """A set of independent chains with cached hidden angles.

    ``spins`` is ``(C, L)`` over +-1 and ``theta`` is ``(C, H)`` with
    ``theta[c] = b + spins[c] @ W`` kept consistent across moves.
    """

    def __init__(self, spins, params: RbmParams, rngs):
        self.spins = np.array(spins, dtype=np.float64, ndmin=2)
        self.rngs = list(rngs)
        if len(self.rngs) != self.spins.shape[0]:
            raise ValueError("one generator per chain required")
        self.theta = params.b + self.spins @ params.w
        self.accepted = np.zeros(self.n_chains, dtype=np.int64)
        self.proposed = np.zeros(self.n_chains, dtype=np.int64)

    @classmethod
    def random(cls, params: RbmParams, n_chains: int, seed) -> "MarkovChains":
        """Uniform random starting spins; chain ``c`` uses stream ``c`` of ``seed``."""
        seqs = np.random.SeedSequence(seed).spawn(n_chains)
        rngs = [np.random.default_rng(s) for s in seqs]
        spins = np.stack([r.choice([-1.0, 1.0], size=params.n_visible) for r in rngs])
        return cls(spins, params, rngs)

    @property
    def n_chains(self) -> int:
        return self.spins.shape[0]

    @property
    def acceptance_rate(self) -> float:
        total = self.proposed.sum()
        return float(self.accepted.sum() / total) if total else 0.0

    def refresh(self, params: RbmParams) -> None:
        """Recompute the angle cache, e.g. after a parameter update."""
        self.theta = params.b + self.spins @ params.w

    def advance(self, params: RbmParams, n_steps: int, active: Optional[np.ndarray] = None) -> None:
        """``n_steps`` Metropolis moves on every chain (or only ``active`` ones)."""
        if n_steps <= 0:
            return
        L = params.n_visible
        C = self.n_chains
        if active is None:
            active = np.ones(C, dtype=bool)
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return
        ks = np.empty((idx.size, n_steps), dtype=np.intp)
        logu = np.empty((idx.size, n_steps))
        for row, c in enumerate(idx):
            # one draw per chain: the first half picks sites, the second half accepts
            u = self.rngs[c].random(2 * n_steps)
            ks[row] = u[:n_steps] * L
            logu[row] = u[n_steps:]
        np.log(logu, out=logu)
        s = self.spins[idx]
        th = self.theta[idx]
        rows = np.arange(idx.size)
        # flipping s_k shifts theta by -2 W[k] s_k and adds -2 a_k s_k to ln psi
        a2, w2 = -2.0 * params.a, -2.0 * params.w
        half_logu = 0.5 * logu
        acc_count = np.zeros(idx.size, dtype=np.int64)
        # ln(2 cosh theta): the constant offset cancels in the ratio
        lc = np.logaddexp(th, -th)
        for t in range(n_steps):
            k = ks[:, t]
            sk = s[rows, k]
            th_new = th + w2[k] * sk[:, None]
            lc_new = np.logaddexp(th_new, -th_new)
            log_ratio = (lc_new - lc).sum(axis=1) + a2[k] * sk
            acc = half_logu[:, t] < log_ratio
            keep = acc[:, None]
            th = np.where(keep, th_new, th)
            lc = np.where(keep, lc_new, lc)
            s[rows, k] = np.where(acc, -sk, sk)
            acc_count += acc
        self.spins[idx] = s
        self.theta[idx] = th
        self.accepted[idx] += acc_count
        self.proposed[idx] += n_steps


def mh_step(chains: MarkovChains, params: RbmParams) -> np.ndarray:
    """One proposal per chain; returns the per-chain acceptance flags."""
    before = chains.accepted.copy()
    chains.advance(params, 1)
    return chains.accepted > before


def acceptance_probability(params: RbmParams, s, k: int) -> float:
    """``min(1, psi(s')^2 / psi(s)^2)`` for flipping site ``k`` of ``s``."""
    s = np.asarray(s, dtype=np.float64)
    th = params.b + s @ params.w
    log_ratio = -2.0 * params.a[k] * s[k] + (log_cosh(th - 2.0 * params.w[k] * s[k]) - log_cosh(th)).sum()
    return float(min(1.0, np.exp(2.0 * log_ratio)))


def sample_batch(
    chains: MarkovChains,
    params: RbmParams,
    n_samples: int,
    thin: int,
    burn_in: int = 0,
) -> np.ndarray:
    """Draw ``n_samples`` spin configurations, shape ``(n_samples, L)``.

    Every chain first runs ``burn_in`` steps. Samples are dealt to chains
    round-robin; a chain records its state after each ``thin`` steps.
    Output rows are grouped by chain index, in recording order.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    C = chains.n_chains
    chains.advance(params, burn_in)
    counts = np.full(C, n_samples // C)
    counts[: n_samples % C] += 1
    rounds = int(counts.max())
    out = np.empty((C, rounds, params.n_visible))
    for r in range(rounds):
        active = counts > r
        if active.all():
            chains.advance(params, thin)
        else:
            chains.advance(params, thin, active)
        out[active, r] = chains.spins[active]
    return np.concatenate([out[c, : counts[c]] for c in range(C)], axis=0)
