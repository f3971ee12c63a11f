"""Real-valued RBM wavefunction over +-1 spins.

    ln psi(s) = sum_i a_i s_i + sum_j ln(2 cosh theta_j),
    theta_j   = b_j + sum_i W_ij s_i

Parameters are packed into one flat vector in the order
``[a (L), b (H), W (L*H, row-major)]``; derivatives, SR updates and
snapshot files all use this layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

LN2 = float(np.log(2.0))
SNAPSHOT_VERSION = 1.0


def log_cosh(x):
    """Overflow-free ln cosh."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - LN2


@dataclass
class RbmParams:
    a: np.ndarray
    b: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.w = np.asarray(self.w, dtype=np.float64)
        if self.w.shape != (self.a.size, self.b.size):
            raise ValueError(f"weight shape {self.w.shape} != ({self.a.size}, {self.b.size})")
        if not (np.isfinite(self.a).all() and np.isfinite(self.b).all() and np.isfinite(self.w).all()):
            raise ValueError("non-finite RBM parameter")

    @property
    def n_visible(self) -> int:
        return self.a.size

    @property
    def n_hidden(self) -> int:
        return self.b.size

    @property
    def n_params(self) -> int:
        return self.a.size + self.b.size + self.w.size

    def packed(self) -> np.ndarray:
        return np.concatenate([self.a, self.b, self.w.ravel()])

    @classmethod
    def from_packed(cls, vec, n_visible: int, n_hidden: int) -> "RbmParams":
        vec = np.asarray(vec, dtype=np.float64)
        L, H = n_visible, n_hidden
        if vec.size != L + H + L * H:
            raise ValueError("packed vector has wrong length")
        return cls(vec[:L].copy(), vec[L : L + H].copy(), vec[L + H :].reshape(L, H).copy())

    def copy(self) -> "RbmParams":
        return RbmParams(self.a.copy(), self.b.copy(), self.w.copy())


def init_params(L: int, H: int, sigma: float = 0.01, seed=None) -> RbmParams:
    """All entries i.i.d. Normal(0, sigma^2), drawn a, then b, then W."""
    if L < 1 or H < 1:
        raise ValueError("RBM needs L >= 1 and H >= 1")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, sigma, L) if sigma > 0 else np.zeros(L)
    b = rng.normal(0.0, sigma, H) if sigma > 0 else np.zeros(H)
    w = rng.normal(0.0, sigma, (L, H)) if sigma > 0 else np.zeros((L, H))
    return RbmParams(a, b, w)


def _spins(p: RbmParams, s) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.shape[-1] != p.n_visible:
        raise ValueError(f"spin length {s.shape[-1]} != visible units {p.n_visible}")
    return s


def theta(p: RbmParams, s) -> np.ndarray:
    """Hidden-unit angles ``b + s W``; works on single configs or batches."""
    return p.b + _spins(p, s) @ p.w


def log_psi(p: RbmParams, s) -> float | np.ndarray:
    s = _spins(p, s)
    th = p.b + s @ p.w
    return s @ p.a + (LN2 + log_cosh(th)).sum(axis=-1)


def log_ratio_flip(p: RbmParams, s, th, k: int) -> float:
    """``ln psi(s with s_k flipped) - ln psi(s)`` from cached angles."""
    if not 0 <= k < p.n_visible:
        raise IndexError(f"site {k} out of range")
    sk = s[k]
    return float(-2.0 * p.a[k] * sk + (log_cosh(th - 2.0 * p.w[k] * sk) - log_cosh(th)).sum())


def apply_flip(p: RbmParams, s: np.ndarray, th: np.ndarray, k: int) -> None:
    """Negate ``s[k]`` and update the cached angles in place."""
    th -= 2.0 * p.w[k] * s[k]
    s[k] = -s[k]


def log_derivatives(p: RbmParams, s, th=None) -> np.ndarray:
    """d ln psi / d Omega in packed order; ``s`` may be a ``(m, L)`` batch."""
    s = _spins(p, s)
    if th is None:
        th = p.b + s @ p.w
    t = np.tanh(th)
    if s.ndim == 1:
        return np.concatenate([s, t, np.outer(s, t).ravel()])
    m = s.shape[0]
    outer = (s[:, :, None] * t[:, None, :]).reshape(m, -1)
    return np.concatenate([s, t, outer], axis=1)


def apply_update(p: RbmParams, delta) -> RbmParams:
    """``Omega + delta`` in packed order, returned as new parameters."""
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != (p.n_params,):
        raise ValueError(f"update length {delta.shape} != ({p.n_params},)")
    if not np.isfinite(delta).all():
        raise FloatingPointError("non-finite parameter update")
    return RbmParams.from_packed(p.packed() + delta, p.n_visible, p.n_hidden)


def save_params(path, p: RbmParams, *, seed=0, iteration=0, alpha=1.0, sigma=0.01) -> None:
    """Flat float64 file: 8-value header then the packed vector."""
    header = np.array(
        [SNAPSHOT_VERSION, p.n_visible, p.n_hidden, seed, iteration, alpha, sigma, 0.0],
        dtype=np.float64,
    )
    np.concatenate([header, p.packed()]).astype("<f8").tofile(str(path))


def load_params(path):
    """Returns ``(params, header_dict)``."""
    raw = np.fromfile(str(Path(path)), dtype="<f8")
    if raw.size < 8 or raw[0] != SNAPSHOT_VERSION:
        raise ValueError("not an RBM snapshot file")
    L, H = int(raw[1]), int(raw[2])
    meta = dict(L=L, H=H, seed=int(raw[3]), iteration=int(raw[4]), alpha=float(raw[5]), sigma=float(raw[6]))
    return RbmParams.from_packed(raw[8:], L, H), meta
