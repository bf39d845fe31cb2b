"""Samplers for random initial data on the torus.

Four coefficient profiles are supported, all driven by independent
standard complex Gaussians g_n normalized so that E|g_n|^2 = 1
(Re g_n, Im g_n independent N(0, 1/2)):

    fwa     sigma_n = |n|^(-alpha), mode 0 excluded
    fwb     sigma_n = (1 + |n|^(2 alpha))^(-1/2), mode 0 included
    white   sigma_n = 1, mode 0 excluded
    general sigma_n = |base_coeffs[n]|

Real-valued fields draw modes n = 1..N independently and force
c_{-n} = conj(c_n); c_0 is a real N(0, sigma_0^2) draw when the mean is
included.  With this convention E|c_n|^2 = sigma_n^2 per mode for every
family, real or complex.

Draw order per stream is fixed (positive-mode block, then the mode-0
scalar) so identical (spec, seed) pairs give bit-identical fields.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .rng import RandomSeed, generator
from .spectral import TorusField, truncate

__all__ = [
    "GaussianFieldSpec",
    "mode_std",
    "per_mode_std",
    "expected_sobolev_sq",
    "sample",
    "sample_matrix",
    "sample_ensemble",
    "shifted_sample",
    "scaled_sample",
    "sobolev_threshold_probe",
    "GrowthReport",
]

FAMILIES = ("fwa", "fwb", "white", "general")


@dataclass(frozen=True)
class GaussianFieldSpec:
    """Which random Fourier series to draw, and at what truncation."""

    family: str
    n_max: int
    alpha: float | None = None
    real_valued: bool = False
    mean_zero: bool | None = None
    base_coeffs: np.ndarray | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.family in ("fwa", "fwb") and self.alpha is None:
            raise ValueError(f"family {self.family!r} requires alpha")
        if self.family == "general":
            if self.base_coeffs is None:
                raise ValueError("family 'general' requires base_coeffs")
            base = np.asarray(self.base_coeffs, dtype=np.complex128).copy()
            if base.shape != (2 * self.n_max + 1,):
                raise ValueError("base_coeffs must have length 2*n_max + 1")
            base.setflags(write=False)
            object.__setattr__(self, "base_coeffs", base)
        elif self.base_coeffs is not None:
            raise ValueError("base_coeffs only valid for family 'general'")
        # fwa and white exclude the zero mode by definition.
        mz = self.mean_zero
        if self.family in ("fwa", "white"):
            if mz is False:
                raise ValueError(f"family {self.family!r} is mean-zero by definition")
            mz = True
        elif mz is None:
            mz = False
        object.__setattr__(self, "mean_zero", bool(mz))


def mode_std(spec: GaussianFieldSpec) -> np.ndarray:
    """Per-mode standard deviations sigma_n over n = -N..N (0 = excluded)."""
    n = np.arange(-spec.n_max, spec.n_max + 1, dtype=np.float64)
    if spec.family == "fwa":
        sig = np.zeros_like(n)
        nz = n != 0
        sig[nz] = np.abs(n[nz]) ** (-spec.alpha)
    elif spec.family == "fwb":
        sig = (1.0 + np.abs(n) ** (2.0 * spec.alpha)) ** (-0.5)
    elif spec.family == "white":
        sig = np.ones_like(n)
    else:
        sig = np.abs(spec.base_coeffs).astype(np.float64)
    if spec.mean_zero:
        sig[spec.n_max] = 0.0
    return sig


def per_mode_std(spec: GaussianFieldSpec, n: int) -> float:
    """sigma_n for a single mode; raises if the mode is excluded."""
    if abs(n) > spec.n_max:
        raise ValueError(f"mode {n} outside truncation {spec.n_max}")
    if n == 0 and spec.mean_zero:
        raise ValueError(f"mode 0 is excluded for this spec (family {spec.family!r})")
    return float(mode_std(spec)[n + spec.n_max])


def expected_sobolev_sq(spec: GaussianFieldSpec, s: float) -> float:
    """Closed form E||phi||_{H^s}^2 = sum <n>^{2s} sigma_n^2 (all families)."""
    n = np.arange(-spec.n_max, spec.n_max + 1, dtype=np.float64)
    return float(np.sum((1.0 + n * n) ** s * mode_std(spec) ** 2))


def _draw_matrix(spec: GaussianFieldSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    """m independent coefficient rows from a single generator."""
    n_max = spec.n_max
    sig = mode_std(spec)
    out = np.zeros((m, 2 * n_max + 1), dtype=np.complex128)
    if spec.real_valued:
        if n_max > 0:
            g = rng.standard_normal((m, 2, n_max))
            pos = (g[:, 0, :] + 1j * g[:, 1, :]) / np.sqrt(2.0)
            pos = pos * sig[n_max + 1:]
            out[:, n_max + 1:] = pos
            out[:, :n_max] = np.conj(pos[:, ::-1])
        g0 = rng.standard_normal(m)
        out[:, n_max] = sig[n_max] * g0
    else:
        g = rng.standard_normal((m, 2, 2 * n_max + 1))
        out = (g[:, 0, :] + 1j * g[:, 1, :]) / np.sqrt(2.0) * sig
    return out


def sample(spec: GaussianFieldSpec, seed: RandomSeed) -> TorusField:
    """One draw from the random series; pure function of (spec, seed)."""
    row = _draw_matrix(spec, 1, generator(seed))[0]
    return TorusField(spec.n_max, row, spec.real_valued)


def sample_matrix(spec: GaussianFieldSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    """m coefficient rows from one explicit generator (chunked callers)."""
    return _draw_matrix(spec, m, rng)


def sample_ensemble(
    spec: GaussianFieldSpec, m: int, seed: RandomSeed, lane_index: int = 0
) -> np.ndarray:
    """m independent draws, one per-sample stream; rows ordered by stream.

    Sample i draws from path (lane_index, 0, i) of the stream, so the
    result is independent of chunking and thread count.
    """
    out = np.empty((m, 2 * spec.n_max + 1), dtype=np.complex128)
    for i in range(m):
        out[i] = _draw_matrix(spec, 1, generator(seed, lane=lane_index, sample=i))[0]
    return out


def _check_shift(v0: TorusField, spec: GaussianFieldSpec) -> TorusField:
    if v0.n_max > spec.n_max:
        raise ValueError(
            f"truncation mismatch: shift has n_max={v0.n_max} > spec n_max={spec.n_max}"
        )
    if spec.real_valued and not v0.real_valued:
        raise ValueError("real_valued spec requires a real_valued shift")
    return truncate(v0, spec.n_max)


def shifted_sample(v0: TorusField, spec: GaussianFieldSpec, seed: RandomSeed) -> TorusField:
    """Draw v0 + phi with phi ~ spec."""
    base = _check_shift(v0, spec)
    phi = sample(spec, seed)
    return TorusField(spec.n_max, base.coeffs + phi.coeffs,
                      spec.real_valued and base.real_valued)


def scaled_sample(
    v0: TorusField, epsilon: float, spec: GaussianFieldSpec, seed: RandomSeed
) -> TorusField:
    """Draw v0 + epsilon * phi for the small-noise family; epsilon > 0."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    base = _check_shift(v0, spec)
    phi = sample(spec, seed)
    return TorusField(spec.n_max, base.coeffs + epsilon * phi.coeffs,
                      spec.real_valued and base.real_valued)


@dataclass(frozen=True)
class GrowthReport:
    """Median partial Sobolev sums versus truncation, with a verdict."""

    s: float
    n_values: tuple
    median_norms: tuple
    tail_slope: float
    verdict: str  # "bounded" | "diverging"
    samples: int

    SLOPE_THRESHOLD = 0.1


def sobolev_threshold_probe(
    spec: GaussianFieldSpec,
    s: float,
    n_grid=(10, 100, 1000, 10000),
    samples: int = 64,
    seed: RandomSeed = RandomSeed(0),
) -> GrowthReport:
    """Classify whether ||phi_N||_{H^s} stays bounded as N grows.

    Draws each sample once at the largest N and evaluates nested partial
    sums, then fits the log-log slope of the median squared norm over the
    largest decade of N.  Slope >= 0.1 is read as divergence; this is a
    calibrated heuristic, not a theorem.
    """
    if spec.family == "general":
        raise ValueError("probe supports parametric families only (fwa/fwb/white)")
    n_grid = tuple(sorted(int(v) for v in n_grid))
    if len(n_grid) < 3:
        raise ValueError("need at least 3 truncation values")
    n_top = n_grid[-1]
    top = dataclasses.replace(spec, n_max=n_top, base_coeffs=None)
    n = np.arange(-n_top, n_top + 1, dtype=np.float64)
    w = (1.0 + n * n) ** s

    med_sq = np.zeros(len(n_grid))
    contrib = np.empty((samples, 2 * n_top + 1))
    for i in range(samples):
        row = _draw_matrix(top, 1, generator(seed, sample=i))[0]
        contrib[i] = w * np.abs(row) ** 2
    for j, nn in enumerate(n_grid):
        sel = np.abs(n) <= nn
        med_sq[j] = np.median(np.sum(contrib[:, sel], axis=1))

    logs_n = np.log(np.asarray(n_grid, dtype=np.float64))
    decade = logs_n >= logs_n[-1] - np.log(10.0)
    if np.sum(decade) < 2:
        decade[-2:] = True
    slope = float(np.polyfit(logs_n[decade], np.log(med_sq[decade]), 1)[0])
    verdict = "diverging" if slope >= GrowthReport.SLOPE_THRESHOLD else "bounded"
    return GrowthReport(
        s=s,
        n_values=n_grid,
        median_norms=tuple(np.sqrt(med_sq)),
        tail_slope=slope,
        verdict=verdict,
        samples=samples,
    )
