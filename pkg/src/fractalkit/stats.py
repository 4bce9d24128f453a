"""Statistical harness for the dimension-gap law.

Collects dimension gaps Delta = dim(G) - dim(R(G)) over a graph
collection, then checks the asymptotic picture empirically: Delta should
be centred near zero, uncorrelated with dim(G), regress with slope ~1
between original and renormalised dimensions, and have variance that
shrinks with diameter like the kappa**2 law.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .boxdim import estimate_dimension, kappa_squared
from .graphs import GraphCollection
from .renorm import DeltaSample, renormalise
from .rng import derive_key

log = logging.getLogger(__name__)


class InsufficientDataError(ValueError):
    """Raised when fewer usable samples exist than the statistic needs."""


@dataclass(frozen=True)
class GaussianDiagnostics:
    """Moments, the dim_r-on-dim_g regression, and the independence test."""

    n: int
    mean: float
    std: float
    intercept: float
    slope: float
    r_squared: float
    corr: float
    corr_p_value: float


@dataclass(frozen=True)
class VarianceBucket:
    d_low: int
    d_high: int
    d_mid: float
    n: int
    empirical_var: float
    kappa_sq: float
    ratio: float


@dataclass(frozen=True)
class VarianceScalingResult:
    buckets: tuple[VarianceBucket, ...]
    monotone_decreasing: bool


def collect_delta(
    collection: GraphCollection,
    r: int = 1,
    trials_per_graph: int = 1,
    seed: int = 0,
) -> list[DeltaSample]:
    """One dimension estimate per graph plus ``trials_per_graph``
    independent renormalisations, each with a derived seed.

    Gated graphs are recorded once with a gated flag; renormalisations
    that fall below the gate are recorded gated too.  Both kinds must be
    excluded from statistics (the diagnostics functions do this).
    """
    if trials_per_graph < 1:
        raise ValueError("trials_per_graph must be >= 1")
    samples: list[DeltaSample] = []
    for gi, g in enumerate(collection.graphs):
        est_g = estimate_dimension(g)
        if est_g.gated:
            samples.append(
                DeltaSample(
                    graph_id=gi,
                    diameter=int(est_g.diameter_used or 0),
                    dim_g=0.0,
                    dim_r=0.0,
                    delta=0.0,
                    gated=True,
                )
            )
            continue
        for t in range(trials_per_graph):
            result = renormalise(g, r, derive_key(seed, gi, t))
            est_r = estimate_dimension(result.super_graph)
            samples.append(
                DeltaSample(
                    graph_id=gi,
                    diameter=int(est_g.diameter_used or 0),
                    dim_g=est_g.dimension,
                    dim_r=est_r.dimension,
                    delta=est_g.dimension - est_r.dimension,
                    gated=est_r.gated,
                )
            )
    if not any(not s.gated for s in samples):
        log.warning("collect_delta: every sample is gated; no usable data")
    return samples


def usable_samples(samples: list[DeltaSample]) -> list[DeltaSample]:
    return [s for s in samples if not s.gated]


def gaussian_diagnostics(samples: list[DeltaSample]) -> GaussianDiagnostics:
    """Sample moments of Delta, OLS of dim_r on dim_g, and the Pearson
    correlation between dim_g and Delta with a two-tailed Student-t
    p-value (df = n - 2)."""
    usable = usable_samples(samples)
    n = len(usable)
    if n < 10:
        raise InsufficientDataError(f"need >= 10 usable samples, got {n}")
    dim_g = np.array([s.dim_g for s in usable])
    dim_r = np.array([s.dim_r for s in usable])
    delta = np.array([s.delta for s in usable])
    if np.var(dim_g) == 0.0:
        raise ValueError("zero variance in dim_g; regression is degenerate")

    xc = dim_g - dim_g.mean()
    slope = float((xc @ dim_r) / (xc @ xc))
    intercept = float(dim_r.mean() - slope * dim_g.mean())
    resid = dim_r - (intercept + slope * dim_g)
    ss_tot = float(((dim_r - dim_r.mean()) ** 2).sum())
    r_squared = 0.0 if ss_tot == 0.0 else 1.0 - float(resid @ resid) / ss_tot

    corr, p_value = _pearson_with_t_pvalue(dim_g, delta)
    return GaussianDiagnostics(
        n=n,
        mean=float(delta.mean()),
        std=float(delta.std(ddof=1)),
        intercept=intercept,
        slope=slope,
        r_squared=r_squared,
        corr=corr,
        corr_p_value=p_value,
    )


def _pearson_with_t_pvalue(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    n = x.size
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return 0.0, 1.0
    r = float(np.clip((xc @ yc) / denom, -1.0, 1.0))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(sps.t.sf(abs(t), df=n - 2))
    return r, min(p, 1.0)


def variance_scaling_check(
    samples: list[DeltaSample],
    sigma: float = 0.1,
    *,
    min_per_bucket: int = 30,
    min_buckets: int = 3,
) -> VarianceScalingResult:
    """Empirical Var(Delta) per log-spaced diameter bucket against the
    kappa**2 prediction at the bucket's geometric midpoint.

    Buckets below ``min_per_bucket`` are merged greedily from the small
    end; fewer than ``min_buckets`` surviving buckets is an error.
    """
    if min_per_bucket < 2:
        raise ValueError("min_per_bucket must be >= 2 (variance needs two samples)")
    usable = usable_samples(samples)
    if not usable:
        raise InsufficientDataError("no usable samples")
    diam = np.array([s.diameter for s in usable], dtype=np.float64)
    delta = np.array([s.delta for s in usable])
    d_lo, d_hi = diam.min(), diam.max()
    if d_lo == d_hi:
        raise ValueError(
            f"all samples share diameter {int(d_lo)}; need >= {min_buckets} buckets"
        )
    n_initial = max(min_buckets, min(12, len(usable) // max(min_per_bucket, 1)))
    edges = np.geomspace(d_lo, d_hi, n_initial + 1)
    edges[-1] = d_hi + 1.0  # right-open final bucket catches the max
    assignment = np.clip(np.searchsorted(edges, diam, side="right") - 1, 0, n_initial - 1)

    groups: list[np.ndarray] = []
    pending = np.empty(0, dtype=np.int64)
    for b in range(n_initial):
        idx = np.concatenate((pending, np.flatnonzero(assignment == b)))
        if idx.size >= min_per_bucket:
            groups.append(idx)
            pending = np.empty(0, dtype=np.int64)
        else:
            pending = idx
    if pending.size:
        if groups:
            groups[-1] = np.concatenate((groups[-1], pending))
        elif pending.size >= 2:
            groups.append(pending)
    if len(groups) < min_buckets:
        counts = [int(g.size) for g in groups]
        raise InsufficientDataError(
            f"insufficient bucket coverage: got {len(groups)} buckets "
            f"with counts {counts}, need >= {min_buckets} of >= {min_per_bucket}"
        )

    buckets = []
    for idx in groups:
        lo = int(diam[idx].min())
        hi = int(diam[idx].max())
        mid = float(np.sqrt(lo * hi))
        emp = float(delta[idx].var(ddof=1))
        kap = kappa_squared(max(2, round(mid)), sigma)
        buckets.append(
            VarianceBucket(
                d_low=lo,
                d_high=hi,
                d_mid=mid,
                n=int(idx.size),
                empirical_var=emp,
                kappa_sq=kap,
                ratio=emp / kap if kap > 0 else float("inf"),
            )
        )
    variances = [b.empirical_var for b in buckets]
    monotone = all(a > b for a, b in zip(variances, variances[1:]))
    return VarianceScalingResult(buckets=tuple(buckets), monotone_decreasing=monotone)
