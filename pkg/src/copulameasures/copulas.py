"""Copula families: validation, CDF evaluation, and exact sampling.

A :class:`CopulaModel` is an immutable (family, dimension, parameters)
triple.  Construction validates the parameter ranges; the resulting
object is safe to share across threads.  ``cdf_many`` is the vectorized
evaluation used by every integrand in the package, ``sample`` draws
exact i.i.d. observations with an explicit seed.

Family names are lowercase strings.  Parameters are positional:

=================  ====================================================
product, min       none
lower_bound_w      none (dimension 2 only)
clayton            alpha  (alpha > 0; at k=2 also -1 <= alpha < 0)
frank              theta != 0  (theta > 0 for k >= 3)
gumbel_hougaard    phi >= 1
joe                theta >= 1
gaussian           strict upper triangle of the correlation matrix,
                   row-major (k=3: rho12, rho13, rho23)
fgm                theta in [-1, 1]  (dimension 2 only)
marshall_olkin     alpha1, alpha2 in [0, 1]  (dimension 2 only)
cuadras_auge       pair weights a_ij in [0, 1], rows i=2..k in order
                   (2,1), (3,1), (3,2), ...  (k=2: a single weight)
gumbel_barnett     theta in (0, 1]  (dimension 2 only)
nelsen_4212        theta >= 1  (dimension 2 only)
=================  ====================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import logsumexp, ndtr, ndtri
from scipy.stats import logser

from . import mvnorm
from .errors import (
    CorrelationNotPD,
    DimensionMismatch,
    DimensionUnsupported,
    NotArchimedean,
    ParamOutOfRange,
    SamplerUnavailable,
)

FAMILIES = (
    "product", "min", "lower_bound_w", "clayton", "frank", "gumbel_hougaard",
    "joe", "gaussian", "fgm", "marshall_olkin", "cuadras_auge",
    "gumbel_barnett", "nelsen_4212",
)

# Families the sources define only in the bivariate case, plus W, which
# is a copula only at k = 2.
_BIVARIATE_ONLY = frozenset(
    {"lower_bound_w", "fgm", "marshall_olkin", "gumbel_barnett", "nelsen_4212"})

_PARAM_FREE = frozenset({"product", "min", "lower_bound_w"})

_SAMPLE_EPS = 1e-15


def corr_from_upper_triangle(dim: int, entries) -> np.ndarray:
    """Full correlation matrix from its strict upper triangle, row-major."""
    entries = np.asarray(entries, dtype=float).ravel()
    expect = dim * (dim - 1) // 2
    if len(entries) != expect:
        raise ParamOutOfRange(
            f"gaussian at k={dim} needs {expect} correlations, got {len(entries)}")
    corr = np.eye(dim)
    corr[np.triu_indices(dim, 1)] = entries
    corr[np.tril_indices(dim, -1)] = corr.T[np.tril_indices(dim, -1)]
    return corr


@dataclass(frozen=True, eq=True)
class CopulaModel:
    """Validated copula model; raises on construction if invalid."""

    family: str
    dim: int
    params: tuple = ()

    # populated by __post_init__, excluded from equality
    _corr: np.ndarray | None = field(default=None, compare=False, repr=False)
    _chol: np.ndarray | None = field(default=None, compare=False, repr=False)
    _ca_thetas: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParamOutOfRange(f"unknown family {self.family!r}")
        if self.dim < 2:
            raise DimensionUnsupported("copulas need dimension k >= 2")
        if self.family in _BIVARIATE_ONLY and self.dim != 2:
            raise DimensionUnsupported(
                f"{self.family} is only defined at dimension 2")
        raw = np.asarray(self.params, dtype=float).ravel() if self.params != () else []
        object.__setattr__(self, "params", tuple(float(p) for p in raw))
        if any(not np.isfinite(p) for p in self.params):
            raise ParamOutOfRange("parameters must be finite")
        self._validate_params()

    def _validate_params(self):
        fam, k, p = self.family, self.dim, self.params
        def need(n):
            if len(p) != n:
                raise ParamOutOfRange(f"{fam} takes {n} parameter(s), got {len(p)}")
        if fam in _PARAM_FREE:
            need(0)
        elif fam == "clayton":
            need(1)
            a = p[0]
            if a == 0.0:
                raise ParamOutOfRange("clayton alpha must be nonzero")
            if k >= 3 and a <= 0.0:
                raise ParamOutOfRange("clayton needs alpha > 0 for k >= 3")
            if a < -1.0:
                raise ParamOutOfRange("clayton alpha must be >= -1")
        elif fam == "frank":
            need(1)
            t = p[0]
            if t == 0.0:
                raise ParamOutOfRange("frank theta must be nonzero")
            if k >= 3 and t <= 0.0:
                raise ParamOutOfRange("frank needs theta > 0 for k >= 3")
            if abs(t) > 700.0:
                raise ParamOutOfRange("frank |theta| > 700 overflows")
        elif fam == "gumbel_hougaard":
            need(1)
            if p[0] < 1.0:
                raise ParamOutOfRange("gumbel_hougaard needs phi >= 1")
        elif fam in ("joe", "nelsen_4212"):
            need(1)
            if p[0] < 1.0:
                raise ParamOutOfRange(f"{fam} needs theta >= 1")
        elif fam == "fgm":
            need(1)
            if abs(p[0]) > 1.0:
                raise ParamOutOfRange("fgm needs |theta| <= 1")
        elif fam == "marshall_olkin":
            need(2)
            if not all(0.0 <= a <= 1.0 for a in p):
                raise ParamOutOfRange("marshall_olkin needs alphas in [0, 1]")
        elif fam == "gumbel_barnett":
            need(1)
            if not 0.0 < p[0] <= 1.0:
                raise ParamOutOfRange("gumbel_barnett needs theta in (0, 1]")
        elif fam == "cuadras_auge":
            need(k * (k - 1) // 2)
            if not all(0.0 <= a <= 1.0 for a in p):
                raise ParamOutOfRange("cuadras_auge weights must lie in [0, 1]")
            # exponent on the i-th smallest coordinate (1-based i >= 2):
            # product of (1 - a_ij) over the i-th parameter row
            thetas = np.ones(k)
            pos = 0
            for i in range(2, k + 1):
                row = p[pos:pos + i - 1]
                pos += i - 1
                thetas[i - 1] = np.prod([1.0 - a for a in row])
            object.__setattr__(self, "_ca_thetas", thetas)
        elif fam == "gaussian":
            corr = corr_from_upper_triangle(k, p)
            if np.any(np.abs(np.asarray(p)) >= 1.0):
                raise CorrelationNotPD("off-diagonal correlations must be in (-1, 1)")
            chol = mvnorm.cholesky_corr(corr)
            object.__setattr__(self, "_corr", corr)
            object.__setattr__(self, "_chol", chol)

    # -- evaluation ----------------------------------------------------

    @property
    def has_zero_region(self) -> bool:
        """True when C vanishes on a positive-measure interior set."""
        return self.family == "lower_bound_w" or (
            self.family == "clayton" and self.params[0] < 0.0)

    def cdf(self, point) -> float:
        """C(u) at a single point of the closed unit cube."""
        u = np.asarray(point, dtype=float).ravel()
        if len(u) != self.dim:
            raise DimensionMismatch(
                f"point has dimension {len(u)}, model has {self.dim}")
        return float(self.cdf_many(u[None, :])[0])

    def cdf_many(self, U: np.ndarray) -> np.ndarray:
        """Vectorized C(u) over the rows of U, clamped into [0, 1]."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.shape[1] != self.dim:
            raise DimensionMismatch(
                f"points have dimension {U.shape[1]}, model has {self.dim}")
        if np.any(U < -1e-12) or np.any(U > 1.0 + 1e-12):
            raise ValueError("coordinates must lie in [0, 1]")
        U = np.clip(U, 0.0, 1.0)
        out = np.zeros(len(U))
        interior = ~(U <= 0.0).any(axis=1)
        if interior.any():
            # divide guards log(0) at coordinates equal to 1, which the
            # generator forms turn into the correct boundary values
            with np.errstate(over="ignore", under="ignore", divide="ignore"):
                out[interior] = self._cdf_positive(U[interior])
        return np.clip(out, 0.0, 1.0)

    def _cdf_positive(self, U: np.ndarray) -> np.ndarray:
        """C(u) with every coordinate in (0, 1]."""
        fam, k = self.family, self.dim
        if fam == "product":
            return U.prod(axis=1)
        if fam == "min":
            return U.min(axis=1)
        if fam == "lower_bound_w":
            return np.maximum(U.sum(axis=1) - 1.0, 0.0)
        if fam == "clayton":
            a = self.params[0]
            inner = np.maximum((U ** -a).sum(axis=1) - (k - 1), 0.0)
            return inner ** (-1.0 / a)
        if fam == "frank":
            t = self.params[0]
            if t > 0:
                # log1p keeps precision for large theta, where e^{-t u}
                # underflows relative to 1
                gi = -np.log1p(-np.exp(-t * U)) + np.log1p(-np.exp(-t))
                s = gi.sum(axis=1)
                return -np.log(-np.expm1(-s) + np.exp(-t - s)) / t
            num = np.expm1(-t * U).prod(axis=1)
            return -np.log1p(num / np.expm1(-t) ** (k - 1)) / t
        if fam == "gumbel_hougaard":
            phi = self.params[0]
            with np.errstate(divide="ignore"):
                logl = np.log(-np.log(U))  # -inf where u = 1
            return np.exp(-np.exp(logsumexp(phi * logl, axis=1) / phi))
        if fam == "joe":
            th = self.params[0]
            g = np.exp(th * np.log1p(-U))          # (1-u)^theta
            t = -np.log1p(-g).sum(axis=1)
            return -np.expm1(np.log(-np.expm1(-t)) / th)
        if fam == "nelsen_4212":
            th = self.params[0]
            t = ((1.0 / U - 1.0) ** th).sum(axis=1)
            return 1.0 / (1.0 + t ** (1.0 / th))
        if fam == "gaussian":
            X = ndtri(np.clip(U, 1e-300, 1.0))
            X = np.clip(X, -mvnorm._X_CLIP, mvnorm._X_CLIP)
            return mvnorm.mvn_cdf_many(self._corr, X)
        if fam == "fgm":
            th = self.params[0]
            u, v = U[:, 0], U[:, 1]
            return u * v * (1.0 + th * (1.0 - u) * (1.0 - v))
        if fam == "marshall_olkin":
            a1, a2 = self.params
            u, v = U[:, 0], U[:, 1]
            return u ** (1 - a1) * v ** (1 - a2) * np.minimum(u ** a1, v ** a2)
        if fam == "cuadras_auge":
            S = np.sort(U, axis=1)
            return (S ** self._ca_thetas).prod(axis=1)
        if fam == "gumbel_barnett":
            th = self.params[0]
            u, v = U[:, 0], U[:, 1]
            return u * v * np.exp(-th * np.log(u) * np.log(v))
        raise AssertionError(fam)

    # -- sampling ------------------------------------------------------

    def sample(self, n: int, seed: int) -> np.ndarray:
        """n exact i.i.d. draws, reproducible for a fixed seed."""
        if n < 1:
            raise ValueError("need n >= 1")
        rng = np.random.default_rng(int(seed))
        fam, k = self.family, self.dim
        if fam == "product":
            out = rng.random((n, k))
        elif fam == "min":
            out = np.repeat(rng.random((n, 1)), k, axis=1)
        elif fam == "lower_bound_w":
            u = rng.random(n)
            out = np.column_stack([u, 1.0 - u])
        elif fam == "clayton":
            out = self._sample_clayton(rng, n)
        elif fam == "frank":
            out = self._sample_frank(rng, n)
        elif fam == "gumbel_hougaard":
            out = self._sample_gumbel(rng, n)
        elif fam == "joe":
            out = self._sample_joe(rng, n)
        elif fam == "gaussian":
            z = rng.standard_normal((n, k)) @ self._chol.T
            out = ndtr(z)
        elif fam == "fgm":
            out = self._sample_fgm(rng, n)
        else:
            raise SamplerUnavailable(
                f"no exact sampler implemented for {fam}")
        return np.clip(out, _SAMPLE_EPS, 1.0 - _SAMPLE_EPS)

    def _sample_clayton(self, rng, n):
        a = self.params[0]
        k = self.dim
        if a > 0:
            # gamma frailty: psi(t) = (1+t)^(-1/alpha)
            v = rng.gamma(1.0 / a, 1.0, size=n)
            e = rng.exponential(1.0, size=(n, k))
            return (1.0 + e / v[:, None]) ** (-1.0 / a)
        u = rng.random(n)
        if a == -1.0:
            return np.column_stack([u, 1.0 - u])
        p = rng.random(n)
        v = (1.0 + u ** -a * (p ** (-a / (1.0 + a)) - 1.0)) ** (-1.0 / a)
        return np.column_stack([u, v])

    def _sample_frank(self, rng, n):
        t = self.params[0]
        k = self.dim
        if t > 0:
            # logarithmic-series frailty: psi is its Laplace transform
            v = logser.rvs(-np.expm1(-t), size=n, random_state=rng).astype(float)
            e = rng.exponential(1.0, size=(n, k))
            x = e / v[:, None]
            return -np.log(-np.expm1(-x) + np.exp(-t - x)) / t
        # negative dependence exists only at k=2; conditional inversion
        u = rng.random(n)
        p = rng.random(n)
        av = np.exp(-t * u)
        d = np.expm1(-t)
        v = -np.log1p(p * d / (av * (1.0 - p) + p)) / t
        return np.column_stack([u, v])

    def _sample_gumbel(self, rng, n):
        phi = self.params[0]
        k = self.dim
        if phi == 1.0:
            return rng.random((n, k))
        # positive stable frailty via Kanter's representation:
        # V = sin(a T)/sin(T)^(1/a) * (sin((1-a)T)/W)^((1-a)/a),
        # T uniform on (0, pi), W unit exponential
        al = 1.0 / phi
        th = np.pi * rng.random(n)
        w = rng.exponential(1.0, size=n)
        v = (np.sin(al * th) / np.sin(th) ** (1.0 / al)
             * (np.sin((1.0 - al) * th) / w) ** ((1.0 - al) / al))
        e = rng.exponential(1.0, size=(n, k))
        return np.exp(-(e / v[:, None]) ** al)

    def _sample_joe(self, rng, n):
        thp = self.params[0]
        k = self.dim
        if thp == 1.0:
            return rng.random((n, k))
        v = _sample_sibuya(1.0 / thp, rng, n)
        e = rng.exponential(1.0, size=(n, k))
        x = e / v[:, None]
        # psi(t) = 1 - (1 - e^{-t})^{1/theta}
        return 1.0 - np.exp(np.log(-np.expm1(-x)) / thp)

    def _sample_fgm(self, rng, n):
        th = self.params[0]
        u = rng.random(n)
        p = rng.random(n)
        a = th * (1.0 - 2.0 * u)
        b = 1.0 + a
        v = np.where(np.abs(a) < 1e-12, p,
                     2.0 * p / (b + np.sqrt(np.maximum(b * b - 4.0 * a * p, 0.0))))
        return np.column_stack([u, v])


def _sample_sibuya(alpha: float, rng, n: int) -> np.ndarray:
    """Sibuya(alpha) draws by bisection on the survival function.

    The survival function S(m) = Gamma(m+1-alpha) / (Gamma(1-alpha) m!)
    obeys S(m) = S(m-1) (m-alpha)/m, so log S is cheap at any m via
    log-gamma; bisection over 1..2^62 inverts it exactly in doubles.
    """
    from scipy.special import gammaln

    u = rng.random(n)
    tail = np.log1p(-u)  # want smallest m with log S(m) <= log(1-u)
    lg1a = gammaln(1.0 - alpha)

    def log_s(m):
        # gammaln differences cancel catastrophically for huge m; switch
        # to the exact-enough tail asymptotic S(m) ~ m^-alpha / G(1-a)
        direct = gammaln(m + 1.0 - alpha) - lg1a - gammaln(m + 1.0)
        return np.where(m < 1e12, direct,
                        -alpha * np.log(np.maximum(m, 1.0)) - lg1a)

    lo = np.zeros(n)            # log S(lo) > tail by convention, S(0)=1
    hi = np.full(n, 2.0 ** 60)
    for _ in range(80):
        mid = np.floor((lo + hi) / 2.0)
        take_hi = log_s(mid) <= tail
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
        if np.all(hi - lo <= 1.0):
            break
    return hi


@dataclass(frozen=True)
class MixtureCopula:
    """Convex combination of same-dimension copulas (itself a copula)."""

    components: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.components) != len(self.weights) or not self.components:
            raise ValueError("need matching nonempty components and weights")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must be convex")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise DimensionMismatch("mixture components must share a dimension")

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def has_zero_region(self) -> bool:
        return all(c.has_zero_region for c in self.components)

    def cdf(self, point) -> float:
        return float(self.cdf_many(np.asarray(point, dtype=float)[None, :])[0])

    def cdf_many(self, U: np.ndarray) -> np.ndarray:
        out = np.zeros(len(np.atleast_2d(U)))
        for w, c in zip(self.weights, self.components):
            out = out + w * c.cdf_many(U)
        return np.clip(out, 0.0, 1.0)


def archimedean_generator(model: CopulaModel) -> tuple[Callable, Callable]:
    """(psi, psi_inverse) with C(u) = psi(sum psi_inverse(u_i)).

    psi(0) = 1 and psi is nonincreasing.  Clayton with alpha < 0 has no
    generator of this form and raises NotArchimedean.
    """
    fam = model.family
    if fam == "clayton":
        a = model.params[0]
        if a < 0:
            raise NotArchimedean(
                "clayton with alpha < 0 has no nonincreasing generator")
        return (lambda t: (1.0 + np.asarray(t, dtype=float)) ** (-1.0 / a),
                lambda u: np.asarray(u, dtype=float) ** -a - 1.0)
    if fam == "frank":
        t0 = model.params[0]
        def psi(t):
            t = np.asarray(t, dtype=float)
            return -np.log1p(np.expm1(-t0) * np.exp(-t)) / t0
        def psi_inv(u):
            u = np.asarray(u, dtype=float)
            return -(np.log(-np.expm1(-t0 * u)) - np.log(-np.expm1(-t0))) \
                if t0 > 0 else -np.log(np.expm1(-t0 * u) / np.expm1(-t0))
        return psi, psi_inv
    if fam == "gumbel_hougaard":
        phi = model.params[0]
        return (lambda t: np.exp(-np.asarray(t, dtype=float) ** (1.0 / phi)),
                lambda u: (-np.log(np.asarray(u, dtype=float))) ** phi)
    if fam == "joe":
        th = model.params[0]
        return (lambda t: 1.0 - (-np.expm1(-np.asarray(t, dtype=float))) ** (1.0 / th),
                lambda u: -np.log1p(-(1.0 - np.asarray(u, dtype=float)) ** th))
    if fam == "nelsen_4212":
        th = model.params[0]
        return (lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float) ** (1.0 / th)),
                lambda u: (1.0 / np.asarray(u, dtype=float) - 1.0) ** th)
    raise NotArchimedean(f"{fam} has no Archimedean generator")
