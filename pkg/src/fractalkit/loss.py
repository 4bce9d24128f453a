"""Dimension-weighted contrastive objectives on caller-supplied embeddings.

Two realisations of the same idea live here:

* ``exact_fractal_loss`` -- the positive pair is up-weighted by
  exp(alpha * |dimension gap|) and each negative by the analogous weight
  between renormalised dimensions; weights multiply the exp(sim/tau)
  terms, i.e. they shift logits additively in log space.

* ``surrogate_fractal_loss`` -- instead of measuring the renormalised
  dimension, its effect is simulated by a Gaussian perturbation whose
  entrywise statistics follow the diameter-controlled variance law
  kappa**2(D): diagonal entries are N(0, kappa**2(D_i)), off-diagonal
  N(|dim_i - dim_j|, kappa**2(D_i) + kappa**2(D_j)).  Logits become
  sim/tau + alpha * G; with sigma -> 0 this degenerates to the exact loss
  evaluated with equal original/renormalised dimensions.

A per-graph gate (diameter <= 9 or fractality R**2 below threshold) zeroes
the effective alpha of every pair the graph participates in; with all
samples gated the surrogate is exactly plain InfoNCE, independent of the
seed.  Perturbations are sampled counter-based per (epoch, id_i, id_j), so
losses do not depend on evaluation order or thread scheduling.

The denominator excludes the positive pair, as in the weighted objective's
definition; individual losses can therefore be negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .boxdim import DEFAULT_PILOT_SIGMA, GATE_DIAMETER, kappa_squared
from .rng import _GOLDEN, _STIR, _finalize_vec, derive_key, standard_normals_from_keys


@dataclass(frozen=True)
class EmbeddingBatch:
    """Anchor embeddings ``z`` and renormalised-view embeddings ``z_r``,
    both (N, d) with finite entries."""

    z: np.ndarray
    z_r: np.ndarray

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=np.float64)
        z_r = np.asarray(self.z_r, dtype=np.float64)
        if z.ndim != 2 or z_r.ndim != 2:
            raise ValueError("embeddings must be 2-D (N, d) matrices")
        if z.shape != z_r.shape:
            raise ValueError(f"shape mismatch: z {z.shape} vs z_r {z_r.shape}")
        if not (np.isfinite(z).all() and np.isfinite(z_r).all()):
            raise ValueError("embeddings must be finite")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "z_r", z_r)

    @property
    def n(self) -> int:
        return self.z.shape[0]


@dataclass(frozen=True)
class LossConfig:
    """Weights, temperature, gate thresholds and sampling seed.

    ``similarity`` may be "cosine" (default) or "dot"; ``denominator_mode``
    "renormalised" (negatives scored against the renormalised views,
    default) or "anchor" (anchor-anchor similarities); ``symmetrize``
    averages the perturbation with its transpose instead of sampling the
    two ordered pairs independently.
    """

    alpha: float = 0.1
    tau: float = 0.4
    sigma: float = DEFAULT_PILOT_SIGMA
    r2_threshold: float = 0.9
    diam_gate: int = GATE_DIAMETER
    seed: int = 0
    anneal_fraction: float = 0.0
    similarity: str = "cosine"
    denominator_mode: str = "renormalised"
    symmetrize: bool = False

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if not 0.0 <= self.anneal_fraction <= 1.0:
            raise ValueError("anneal_fraction must be in [0, 1]")
        if self.similarity not in ("cosine", "dot"):
            raise ValueError("similarity must be 'cosine' or 'dot'")
        if self.denominator_mode not in ("renormalised", "anchor"):
            raise ValueError("denominator_mode must be 'renormalised' or 'anchor'")


@dataclass(frozen=True)
class GraphMeta:
    """Per-graph facts feeding the gate and the variance law."""

    graph_id: int
    diameter: int
    dimension: float
    r_squared: float
    gated: bool


@dataclass(frozen=True)
class DimensionPairs:
    """Computed dimensions for the exact loss: original ``dim_g``,
    renormalised ``dim_r``, and optionally the second independent
    renormalisation ``dim_r_prime`` used in denominator weights
    (defaults to ``dim_r``)."""

    dim_g: np.ndarray
    dim_r: np.ndarray
    dim_r_prime: np.ndarray | None = None

    def __post_init__(self) -> None:
        dim_g = np.asarray(self.dim_g, dtype=np.float64)
        dim_r = np.asarray(self.dim_r, dtype=np.float64)
        if dim_g.shape != dim_r.shape or dim_g.ndim != 1:
            raise ValueError("dim_g and dim_r must be 1-D arrays of equal length")
        prime = self.dim_r_prime
        prime = dim_r if prime is None else np.asarray(prime, dtype=np.float64)
        if prime.shape != dim_r.shape:
            raise ValueError("dim_r_prime must match dim_r in shape")
        object.__setattr__(self, "dim_g", dim_g)
        object.__setattr__(self, "dim_r", dim_r)
        object.__setattr__(self, "dim_r_prime", prime)


@dataclass(frozen=True)
class LossReport:
    """Per-sample losses plus the audit trail of the perturbation."""

    per_sample_loss: np.ndarray
    mean_loss: float
    perturbed_similarity: np.ndarray
    perturbation: np.ndarray
    effective_alpha: np.ndarray


@dataclass(frozen=True)
class LemmaRatio:
    measured_ratio: float
    expected_w: float
    relative_error: float


def cosine_similarity_matrix(batch: EmbeddingBatch) -> np.ndarray:
    """S[i, j] = cos(z_i, z_r_j); raises if any row has zero norm."""
    for name, mat in (("z", batch.z), ("z_r", batch.z_r)):
        norms = np.linalg.norm(mat, axis=1)
        bad = np.flatnonzero(norms == 0.0)
        if bad.size:
            raise ValueError(f"zero-norm row {int(bad[0])} in {name}")
    zn = batch.z / np.linalg.norm(batch.z, axis=1, keepdims=True)
    rn = batch.z_r / np.linalg.norm(batch.z_r, axis=1, keepdims=True)
    return zn @ rn.T


def _similarity(batch: EmbeddingBatch, cfg: LossConfig, *, anchor: bool = False) -> np.ndarray:
    source = EmbeddingBatch(z=batch.z, z_r=batch.z) if anchor else batch
    if cfg.similarity == "dot":
        return source.z @ source.z_r.T
    return cosine_similarity_matrix(source)


def _nce_losses(logits: np.ndarray) -> np.ndarray:
    """-diag(logits) + logsumexp over the off-diagonal of each row."""
    n = logits.shape[0]
    off = logits.copy()
    np.fill_diagonal(off, -np.inf)
    return -np.diagonal(logits) + logsumexp(off, axis=1)


def _effective_gate(metas: list[GraphMeta], cfg: LossConfig) -> np.ndarray:
    return np.array(
        [
            m.gated or m.diameter <= cfg.diam_gate or m.r_squared < cfg.r2_threshold
            for m in metas
        ],
        dtype=bool,
    )


def _pair_keys(seed: int, epoch: int, ids: np.ndarray) -> np.ndarray:
    """Counter-based key per ordered pair (id_i, id_j), matching
    ``derive_key(seed, epoch, id_i, id_j)`` bit for bit."""
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        base = np.asarray(derive_key(seed, epoch), dtype=np.uint64)
        ids64 = ids.astype(np.uint64)
        stirred = ids64 * np.uint64(_STIR)
        level1 = _finalize_vec((base + np.uint64(_GOLDEN)) ^ stirred)
        grid = _finalize_vec((level1[:, None] + np.uint64(_GOLDEN)) ^ stirred[None, :])
    return grid


def sample_gaussian_matrix(
    metas: list[GraphMeta], cfg: LossConfig, epoch: int = 0
) -> np.ndarray:
    """Draw the perturbation matrix G for a batch.

    G[i, i] ~ N(0, kappa**2(D_i)); G[i, j] ~ N(|dim_i - dim_j|,
    kappa**2(D_i) + kappa**2(D_j)) for i != j, all entries independent
    (counter-based on (epoch, id_i, id_j)).  Entries touching a gated
    graph are left at zero: their effective alpha is zero anyway and the
    variance law is undefined below the gate.
    """
    n = len(metas)
    ids = np.array([m.graph_id for m in metas], dtype=np.int64)
    if np.unique(ids).size != n:
        raise ValueError("graph ids must be unique (they key the noise streams)")
    gated = _effective_gate(metas, cfg)
    dims = np.array([m.dimension for m in metas])
    kap = np.zeros(n)
    for i, m in enumerate(metas):
        if not gated[i]:
            if m.diameter < 2:
                raise RuntimeError(
                    f"graph {m.graph_id}: ungated but diameter {m.diameter} < 2; "
                    "the gate should have excluded it"
                )
            kap[i] = kappa_squared(m.diameter, cfg.sigma)
    means = np.abs(dims[:, None] - dims[None, :])
    np.fill_diagonal(means, 0.0)
    variances = kap[:, None] + kap[None, :]
    np.fill_diagonal(variances, kap)
    keys = _pair_keys(cfg.seed, epoch, ids)
    z = standard_normals_from_keys(keys.ravel()).reshape(n, n)
    g = means + np.sqrt(variances) * z
    live = ~gated
    mask = live[:, None] & live[None, :]
    g[~mask] = 0.0
    return g


def surrogate_fractal_loss(
    batch: EmbeddingBatch, metas: list[GraphMeta], cfg: LossConfig, epoch: int = 0
) -> LossReport:
    """One-shot loss: logits = sim/tau + alpha * G with G drawn from the
    diameter-controlled Gaussian law; gated graphs contribute alpha = 0 to
    every pair they touch, so an all-gated batch is plain InfoNCE."""
    n = batch.n
    if n < 2:
        raise ValueError("need at least 2 samples (denominator would be empty)")
    if len(metas) != n:
        raise ValueError(f"got {len(metas)} metadata rows for {n} samples")
    s = _similarity(batch, cfg)
    g = sample_gaussian_matrix(metas, cfg, epoch)
    if cfg.symmetrize:
        g = 0.5 * (g + g.T)
    gated = _effective_gate(metas, cfg)
    live = ~gated
    pair_alpha = np.where(live[:, None] & live[None, :], cfg.alpha, 0.0)
    logits = s / cfg.tau + pair_alpha * g
    losses = _nce_losses(logits)
    return LossReport(
        per_sample_loss=losses,
        mean_loss=float(losses.mean()),
        perturbed_similarity=s + pair_alpha * g,
        perturbation=g,
        effective_alpha=np.where(live, cfg.alpha, 0.0),
    )


def exact_fractal_loss(
    batch: EmbeddingBatch, dims: DimensionPairs, cfg: LossConfig
) -> LossReport:
    """Weighted contrastive loss with computed dimensions.

    Positive-pair log-weight: alpha * |dim_g - dim_r| per sample.
    Negative log-weight for (n, k): alpha * |dim_r[n] - dim_r_prime[k]|.
    The denominator similarity defaults to sim(z_n, z_k^(R)); the
    anchor-anchor variant sits behind ``cfg.denominator_mode``.
    """
    n = batch.n
    if n < 2:
        raise ValueError("need at least 2 samples (denominator would be empty)")
    if dims.dim_g.shape[0] != n:
        raise ValueError(f"got {dims.dim_g.shape[0]} dimension rows for {n} samples")
    s_cross = _similarity(batch, cfg)
    s_den = (
        s_cross
        if cfg.denominator_mode == "renormalised"
        else _similarity(batch, cfg, anchor=True)
    )
    pos_logw = cfg.alpha * np.abs(dims.dim_g - dims.dim_r)
    neg_logw = cfg.alpha * np.abs(dims.dim_r[:, None] - dims.dim_r_prime[None, :])
    logits = s_den / cfg.tau + neg_logw
    np.fill_diagonal(logits, np.diagonal(s_cross) / cfg.tau + pos_logw)
    losses = _nce_losses(logits)
    return LossReport(
        per_sample_loss=losses,
        mean_loss=float(losses.mean()),
        perturbed_similarity=s_cross,
        perturbation=np.zeros_like(s_cross),
        effective_alpha=np.full(n, cfg.alpha),
    )


def candidate_losses(
    similarities: np.ndarray, deltas: np.ndarray, cfg: LossConfig
) -> np.ndarray:
    """Per-candidate decomposition -s/tau - log w + log Z with the signed
    weight w = exp(alpha * delta) and Z common to all candidates.

    This is the form in which the dimension-dominated ranking property is
    stated: among near-equal similarities, the candidate with the larger
    dimension gap gets the smaller loss.
    """
    s = np.asarray(similarities, dtype=np.float64)
    d = np.asarray(deltas, dtype=np.float64)
    if s.shape != d.shape or s.ndim != 1 or s.size == 0:
        raise ValueError("similarities and deltas must be equal-length 1-D arrays")
    logw = cfg.alpha * d
    log_z = logsumexp(s / cfg.tau + logw)
    return -s / cfg.tau - logw + log_z


def lemma_gradient_ratio(
    batch: EmbeddingBatch,
    dims: DimensionPairs,
    cfg: LossConfig,
    n: int,
    step: float = 1e-5,
) -> LemmaRatio:
    """Finite-difference check of the gradient-scaling property.

    The weighted loss, realised with the positive-pair weight
    w = exp(alpha * (dim_g - dim_r)) scaling the positive similarity
    inside the exponent, has d loss / d s exactly w times the plain
    InfoNCE derivative; both are measured by central differences with all
    other batch terms held fixed.
    """
    if not 0 <= n < batch.n:
        raise ValueError(f"sample index {n} out of range")
    if batch.n < 2:
        raise ValueError("need at least 2 samples")
    if dims.dim_g.shape[0] != batch.n:
        raise ValueError("dimension rows must match the batch")
    s_cross = _similarity(batch, cfg)
    s_den = (
        s_cross
        if cfg.denominator_mode == "renormalised"
        else _similarity(batch, cfg, anchor=True)
    )
    others = np.arange(batch.n) != n
    neg_logw = cfg.alpha * np.abs(dims.dim_r[n] - dims.dim_r_prime[others])
    log_z_frac = logsumexp(s_den[n, others] / cfg.tau + neg_logw)
    log_z_plain = logsumexp(s_den[n, others] / cfg.tau)
    w = math.exp(cfg.alpha * (dims.dim_g[n] - dims.dim_r[n]))
    s0 = float(s_cross[n, n])

    def loss_frac(s: float) -> float:
        return -s * w / cfg.tau + log_z_frac

    def loss_plain(s: float) -> float:
        return -s / cfg.tau + log_z_plain

    num = loss_frac(s0 + step) - loss_frac(s0 - step)
    den = loss_plain(s0 + step) - loss_plain(s0 - step)
    if not (math.isfinite(num) and math.isfinite(den)) or den == 0.0:
        raise FloatingPointError("finite-difference step produced non-finite values")
    measured = num / den
    return LemmaRatio(
        measured_ratio=measured,
        expected_w=w,
        relative_error=abs(measured / w - 1.0),
    )


def anneal_alpha(cfg: LossConfig, epoch: int, total_epochs: int) -> float:
    """Linear decay of alpha across epochs; ``anneal_fraction`` is the
    total proportion removed by the final epoch (0 disables annealing)."""
    if total_epochs < 1:
        raise ValueError("total_epochs must be >= 1")
    if not 0 <= epoch < total_epochs:
        raise ValueError(f"epoch {epoch} out of range for {total_epochs} epochs")
    span = max(total_epochs - 1, 1)
    return cfg.alpha * (1.0 - cfg.anneal_fraction * epoch / span)
