"""Statistical machinery shared by the experiment drivers."""

from __future__ import annotations

import numpy as np
from scipy import stats as sps

__all__ = [
    "ks_two_sample",
    "holm_adjust",
    "multinomial_resample",
    "wilson_interval",
    "spearman_rho",
    "standard_error",
    "uniformity_ks",
]


def ks_two_sample(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov distance and asymptotic p-value."""
    res = sps.ks_2samp(np.asarray(x), np.asarray(y), method="asymp")
    return float(res.statistic), float(res.pvalue)


def holm_adjust(p_values) -> np.ndarray:
    """Holm step-down adjusted p-values (reject when adjusted < alpha)."""
    p = np.asarray(p_values, dtype=np.float64)
    m = p.size
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * p[idx])
        adjusted[idx] = min(1.0, running)
    return adjusted


def multinomial_resample(weights: np.ndarray, m_out: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Indices of a multinomial draw from normalized weights."""
    w = np.asarray(weights, dtype=np.float64)
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be normalized")
    counts = rng.multinomial(m_out, w)
    return np.repeat(np.arange(w.size), counts)


def wilson_interval(hits: int, n: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (default 95%)."""
    if n <= 0:
        raise ValueError("n must be > 0")
    phat = hits / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * np.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return float(max(0.0, center - half)), float(min(1.0, center + half))


def spearman_rho(x, y) -> float:
    """Spearman rank correlation (nan for degenerate inputs)."""
    res = sps.spearmanr(np.asarray(x), np.asarray(y))
    return float(res.statistic)


def standard_error(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        return float("inf")
    return float(np.std(x, ddof=1) / np.sqrt(x.size))


def uniformity_ks(p_values) -> tuple[float, float]:
    """One-sample KS test of p-values against Uniform(0, 1)."""
    res = sps.kstest(np.asarray(p_values), "uniform")
    return float(res.statistic), float(res.pvalue)


def weighted_ks_bootstrap(
    xa: np.ndarray,
    wa: np.ndarray,
    xb: np.ndarray,
    wb: np.ndarray,
    rng: np.random.Generator,
    reps: int = 2000,
    batch: int = 250,
) -> tuple[float, float]:
    """Two-sample KS for self-normalized weighted ensembles.

    The statistic is the sup difference of the weighted ECDFs over the
    pooled sample points.  Its null distribution is calibrated by the
    pair bootstrap: resample (value, weight) pairs within each ensemble,
    recenter at the observed ECDFs, and count recentered sup differences
    at least as large as the observed one.  This stays valid when weights
    correlate with the observable, where resampling to nominally
    unweighted ensembles of the same size does not (duplicates halve the
    effective size and inflate the false-positive rate).
    """
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    na, nb = xa.size, xb.size
    wta = np.asarray(wa, dtype=np.float64) / np.sum(wa)
    wtb = np.asarray(wb, dtype=np.float64) / np.sum(wb)

    pool = np.concatenate([xa, xb])
    order = np.argsort(pool, kind="stable")
    isa = order < na
    slot_a = np.where(isa)[0]
    slot_b = np.where(~isa)[0]
    src_a = order[slot_a]
    src_b = order[slot_b] - na

    f_a = np.zeros(na + nb)
    f_a[slot_a] = wta[src_a]
    f_a = np.cumsum(f_a)
    f_b = np.zeros(na + nb)
    f_b[slot_b] = wtb[src_b]
    f_b = np.cumsum(f_b)
    d_obs = float(np.max(np.abs(f_a - f_b)))

    exceed = 0
    done = 0
    while done < reps:
        size = min(batch, reps - done)
        counts_a = rng.multinomial(na, np.full(na, 1.0 / na), size=size)
        counts_b = rng.multinomial(nb, np.full(nb, 1.0 / nb), size=size)
        wsa = counts_a * wta
        wsa /= wsa.sum(axis=1, keepdims=True)
        wsb = counts_b * wtb
        wsb /= wsb.sum(axis=1, keepdims=True)
        block_a = np.zeros((size, na + nb))
        block_a[:, slot_a] = wsa[:, src_a]
        block_b = np.zeros((size, na + nb))
        block_b[:, slot_b] = wsb[:, src_b]
        g = (np.cumsum(block_a, axis=1) - f_a) - (np.cumsum(block_b, axis=1) - f_b)
        d_star = np.max(np.abs(g), axis=1)
        exceed += int(np.sum(d_star >= d_obs - 1e-12))
        done += size
    p = (1.0 + exceed) / (reps + 1.0)
    return d_obs, float(p)
