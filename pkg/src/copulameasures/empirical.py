"""Rank-based estimation: pseudo-observations and the empirical beta copula.

Raw data turns into a :class:`RankedSample` (column ranks with random
tie-breaking and an audit trail).  From it, :func:`empirical_copula_cdf`
evaluates the step-function estimator and :class:`EmpiricalBetaCopula`
the smooth rank-binomial one, which is a genuine copula when ranks are
permutations.  Plug-in measure estimates reuse the cubature backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import betainc

from .cubature import IntegrationConfig
from .errors import DimensionMismatch, NonFiniteData
from . import measures

_CHUNK = 4096  # cap on points per betainc block, keeps memory ~ N * chunk


@dataclass(frozen=True)
class RankedSample:
    """Columnwise ranks 1..N with tie-break bookkeeping."""

    ranks: np.ndarray          # (N, k) ints, each column a permutation of 1..N
    tie_seed: int
    ties_broken: tuple         # per column, observations re-ordered at random

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def k(self) -> int:
        return self.ranks.shape[1]

    def pseudo_observations(self) -> np.ndarray:
        """R/(N+1), strictly inside the unit cube, column means 1/2."""
        return self.ranks / (self.n + 1.0)


def rank_with_random_ties(data: np.ndarray, tie_seed: int) -> RankedSample:
    """Columnwise ranks; tied groups are ordered by a seeded shuffle."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError("need an (N, k) array with N >= 2")
    if not np.all(np.isfinite(data)):
        raise NonFiniteData("data contains NaN or infinity")
    n, k = data.shape
    rng = np.random.default_rng(int(tie_seed))
    ranks = np.empty((n, k), dtype=np.int64)
    ties = []
    for j in range(k):
        col = data[:, j]
        ties.append(int(n - np.unique(col).size))
        # shuffling first makes the stable sort break ties uniformly
        perm = rng.permutation(n)
        order = perm[np.argsort(col[perm], kind="stable")]
        ranks[order, j] = np.arange(1, n + 1)
    return RankedSample(ranks=ranks, tie_seed=int(tie_seed), ties_broken=tuple(ties))


def empirical_copula_cdf(rs: RankedSample, point) -> float:
    """Step-function estimator: mean of the joint pseudo-obs indicators."""
    u = np.asarray(point, dtype=float).ravel()
    if len(u) != rs.k:
        raise DimensionMismatch(f"point dimension {len(u)} != {rs.k}")
    return float((rs.pseudo_observations() <= u).all(axis=1).mean())


def empirical_copula_cdf_many(rs: RankedSample, U: np.ndarray) -> np.ndarray:
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if U.shape[1] != rs.k:
        raise DimensionMismatch(f"points dimension {U.shape[1]} != {rs.k}")
    e = rs.pseudo_observations()
    out = np.empty(len(U))
    for lo in range(0, len(U), _CHUNK):
        block = U[lo:lo + _CHUNK]
        out[lo:lo + _CHUNK] = (
            (e[None, :, :] <= block[:, None, :]).all(axis=2).mean(axis=1))
    return out


@lru_cache(maxsize=8)
def _pseudo_obs_basis(n: int) -> np.ndarray:
    """B[r-1, q-1] = S(q/(N+1); N, r), shared by all rank matrices of size N."""
    r = np.arange(1, n + 1, dtype=float)
    q = np.arange(1, n + 1, dtype=float) / (n + 1.0)
    return betainc(r[:, None], n - r[:, None] + 1.0, q[None, :])


@dataclass(frozen=True)
class EmpiricalBetaCopula:
    """Smooth copula built from rank-binomial survival functions.

    S(u; N, R) is evaluated as the regularized incomplete beta function
    I_u(R, N-R+1), which is exact and O(1) per point.
    """

    rs: RankedSample
    _basis: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_basis", _pseudo_obs_basis(self.rs.n))

    @property
    def dim(self) -> int:
        return self.rs.k

    @property
    def has_zero_region(self) -> bool:
        return False

    def cdf(self, point) -> float:
        u = np.asarray(point, dtype=float).ravel()
        if len(u) != self.dim:
            raise DimensionMismatch(f"point dimension {len(u)} != {self.dim}")
        return float(self.cdf_many(u[None, :])[0])

    def cdf_many(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.shape[1] != self.dim:
            raise DimensionMismatch(f"points dimension {U.shape[1]} != {self.dim}")
        U = np.clip(U, 0.0, 1.0)
        n, k = self.rs.n, self.rs.k
        r = np.arange(1, n + 1, dtype=float)
        out = np.empty(len(U))
        for lo in range(0, len(U), _CHUNK):
            block = U[lo:lo + _CHUNK]                       # (m, k)
            prod = np.ones((len(block), n))
            for j in range(k):
                s_all = betainc(r[None, :], n - r[None, :] + 1.0,
                                block[:, j][:, None])       # (m, n) over ranks
                prod *= s_all[:, self.rs.ranks[:, j] - 1]
            out[lo:lo + _CHUNK] = prod.mean(axis=1)
        return np.clip(out, 0.0, 1.0)

    def cdf_at_pseudo_observations(self) -> np.ndarray:
        """Values at the sample's own pseudo-observations, via the shared
        N x N basis (no incomplete-beta evaluations per call)."""
        n = self.rs.n
        prod = np.ones((n, n))
        for j in range(self.rs.k):
            col = self.rs.ranks[:, j] - 1
            prod *= self._basis[np.ix_(col, col)].T  # row: eval point, col: obs
        return prod.mean(axis=1)

    def mean_integral(self) -> float:
        """Exact integral of the copula over the cube.

        Uses int_0^1 S(u; N, R) du = (N + 1 - R)/(N + 1).
        """
        n = self.rs.n
        w = (n + 1.0 - self.rs.ranks) / (n + 1.0)
        return float(w.prod(axis=1).mean())


def beta_copula_cdf(rs: RankedSample, point) -> float:
    return EmpiricalBetaCopula(rs).cdf(point)


def beta_copula_mean(rs: RankedSample) -> float:
    return EmpiricalBetaCopula(rs).mean_integral()


def _cfg_for_empirical(k: int, cfg: IntegrationConfig | None) -> IntegrationConfig:
    cfg = cfg or IntegrationConfig()
    if cfg.method == "auto" and k >= 4:
        # subdivision cost times N per point is prohibitive here
        return IntegrationConfig(method="qmc", abs_tol=cfg.abs_tol,
                                 rel_tol=cfg.rel_tol, max_evals=cfg.max_evals,
                                 qmc_seed=cfg.qmc_seed)
    return cfg


def empirical_cce(rs: RankedSample, cfg: IntegrationConfig | None = None):
    """Plug-in entropy of the empirical beta copula."""
    c = EmpiricalBetaCopula(rs)
    return measures.cce(c, _cfg_for_empirical(c.dim, cfg))


def empirical_fcce(rs: RankedSample, r: float,
                   cfg: IntegrationConfig | None = None):
    c = EmpiricalBetaCopula(rs)
    return measures.fcce(c, r, _cfg_for_empirical(c.dim, cfg))


def empirical_ccigf(rs: RankedSample, s: float,
                    cfg: IntegrationConfig | None = None):
    c = EmpiricalBetaCopula(rs)
    return measures.ccigf(c, s, _cfg_for_empirical(c.dim, cfg))
