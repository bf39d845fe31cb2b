"""Fourier representation of functions on the torus.

Conventions used throughout the package:

    u(x) = sum_{|n| <= N} c_n e^{inx},   x in [0, 2*pi),

with coefficients stored in increasing mode order n = -N, ..., N
(array index n + N).  Integrals are over [0, 2*pi), so by Parseval

    int |u|^2 dx = 2*pi * sum_n |c_n|^2.

Sobolev norms use the plain coefficient sum (no 2*pi factor):

    ||u||_{H^s}^2 = sum_n <n>^{2s} |c_n|^2,   <n> = (1 + n^2)^(1/2).

Both scalings are exposed (``mean_square`` vs ``lp_integral``) so that no
caller has to guess which one a routine uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TorusField",
    "GridConfig",
    "zero_field",
    "field_from_modes",
    "mode",
    "sobolev_norm",
    "lp_integral",
    "mean_value",
    "mean_square",
    "derivative",
    "truncate",
    "to_physical",
    "from_physical",
    "pointwise_product",
    "default_grid",
    "lp_min_points",
    "synthesize",
    "analyze",
    "field_to_json",
    "field_from_json",
]

_SYMMETRY_RTOL = 1e-12


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class TorusField:
    """Truncated Fourier series on the torus; immutable value object.

    Attributes:
        n_max: truncation N >= 0; modes |n| <= N are stored.
        coeffs: complex array of length 2N+1, entry i holds c_{i-N}.
        real_valued: if True, c_{-n} = conj(c_n) and Im(c_0) = 0.
    """

    n_max: int
    coeffs: np.ndarray
    real_valued: bool = False

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")
        c = np.asarray(self.coeffs, dtype=np.complex128).copy()
        if c.shape != (2 * self.n_max + 1,):
            raise ValueError(
                f"expected {2 * self.n_max + 1} coefficients for n_max={self.n_max}, "
                f"got shape {c.shape}"
            )
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValueError("coefficients must be finite (no NaN/Inf)")
        if self.real_valued:
            scale = max(float(np.max(np.abs(c))), 1.0)
            sym_err = np.max(np.abs(c - np.conj(c[::-1])))
            if sym_err > _SYMMETRY_RTOL * scale:
                raise ValueError(
                    f"real_valued field violates c_-n = conj(c_n) (error {sym_err:.3e})"
                )
            if abs(c[self.n_max].imag) > _SYMMETRY_RTOL * scale:
                raise ValueError("real_valued field must have Im(c_0) = 0")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def modes(self) -> np.ndarray:
        """Mode indices n = -N, ..., N aligned with ``coeffs``."""
        return np.arange(-self.n_max, self.n_max + 1)

    def with_coeffs(self, coeffs: np.ndarray) -> "TorusField":
        return TorusField(self.n_max, coeffs, self.real_valued)


@dataclass(frozen=True)
class GridConfig:
    """Physical collocation grid for quadrature and transforms.

    m_points must be a power of two; padding_factor >= 1 records the
    oversampling used for dealiased products (3/2 for quadratic
    nonlinearities, 2 for cubic).
    """

    m_points: int
    padding_factor: float = 1.5

    def __post_init__(self):
        if not _is_power_of_two(self.m_points):
            raise ValueError(f"m_points must be a power of two, got {self.m_points}")
        if self.padding_factor < 1.0:
            raise ValueError("padding_factor must be >= 1")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, 2.0 * np.pi, self.m_points, endpoint=False)


def default_grid(n_max: int, padding_factor: float = 1.5) -> GridConfig:
    """Smallest power-of-two grid with M >= padding_factor * (2N+1)."""
    target = max(2, math.ceil(padding_factor * (2 * n_max + 1)))
    m = 1
    while m < target:
        m *= 2
    return GridConfig(m_points=m, padding_factor=padding_factor)


def zero_field(n_max: int, real_valued: bool = False) -> TorusField:
    return TorusField(n_max, np.zeros(2 * n_max + 1, dtype=np.complex128), real_valued)


def field_from_modes(n_max: int, entries: dict, real_valued: bool = False) -> TorusField:
    """Build a field from a {mode: coefficient} dict; other modes are zero."""
    c = np.zeros(2 * n_max + 1, dtype=np.complex128)
    for n, value in entries.items():
        if abs(n) > n_max:
            raise ValueError(f"mode {n} outside truncation {n_max}")
        c[n + n_max] = value
    return TorusField(n_max, c, real_valued)


def mode(f: TorusField, n: int) -> complex:
    """Coefficient c_n; zero for |n| > N."""
    if abs(n) > f.n_max:
        return 0.0 + 0.0j
    return complex(f.coeffs[n + f.n_max])


def sobolev_norm(f: TorusField, s: float, homogeneous: bool = False) -> float:
    """Weighted-l2 Sobolev norm of the coefficient vector.

    Inhomogeneous: (sum <n>^{2s} |c_n|^2)^(1/2); homogeneous variant sums
    |n|^{2s} |c_n|^2 over n != 0 only.
    """
    n = f.modes.astype(np.float64)
    mags = np.abs(f.coeffs) ** 2
    if homogeneous:
        nz = n != 0
        return float(np.sqrt(np.sum(np.abs(n[nz]) ** (2 * s) * mags[nz])))
    return float(np.sqrt(np.sum((1.0 + n * n) ** s * mags)))


def mean_value(f: TorusField) -> complex:
    """Normalized mean (1/2pi) int u dx, i.e. the coefficient c_0."""
    return complex(f.coeffs[f.n_max])


def mean_square(f: TorusField) -> float:
    """Normalized mean of |u|^2: (1/2pi) int |u|^2 dx = sum |c_n|^2."""
    return float(np.sum(np.abs(f.coeffs) ** 2))


def lp_min_points(n_max: int, p: float) -> int:
    """Smallest M for which the M-point quadrature of |u|^p is exact.

    |u|^p with integer p is a trigonometric polynomial of degree p*N, and
    the equispaced rule is exact up to degree M-1.  Non-integer p is not a
    trig polynomial; ceil(p) is used as the resolution floor.
    """
    return int(math.ceil(p)) * n_max + 1


def lp_integral(f: TorusField, p: float, grid: GridConfig) -> float:
    """Quadrature of int_T |u|^p dx on the collocation grid.

    Exact for integer p when grid.m_points >= p*N + 1; refuses smaller
    grids rather than returning an aliased value.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    required = lp_min_points(f.n_max, p)
    if grid.m_points < required:
        raise ValueError(
            f"grid too small for |u|^{p} at n_max={f.n_max}: "
            f"need m_points >= {required}, got {grid.m_points}"
        )
    u = synthesize(f.coeffs[np.newaxis, :], f.n_max, grid.m_points)[0]
    return float(2.0 * np.pi * np.mean(np.abs(u) ** p))


def derivative(f: TorusField, k: int) -> TorusField:
    """k-th spectral derivative: c_n -> (i n)^k c_n."""
    if k < 1:
        raise ValueError(f"derivative order must be >= 1, got {k}")
    mult = (1j * f.modes.astype(np.float64)) ** k
    return TorusField(f.n_max, mult * f.coeffs, f.real_valued)


def truncate(f: TorusField, n_new: int) -> TorusField:
    """Drop coefficients with |n| > n_new (or zero-pad when n_new > N)."""
    if n_new < 0:
        raise ValueError(f"n_new must be >= 0, got {n_new}")
    if n_new == f.n_max:
        return f
    c = np.zeros(2 * n_new + 1, dtype=np.complex128)
    keep = min(n_new, f.n_max)
    c[n_new - keep:n_new + keep + 1] = f.coeffs[f.n_max - keep:f.n_max + keep + 1]
    return TorusField(n_new, c, f.real_valued)


def synthesize(coeffs: np.ndarray, n_max: int, m_points: int) -> np.ndarray:
    """Evaluate batched coefficient rows on the M-point grid (complex values).

    coeffs has shape (batch, 2N+1); requires M >= 2N+2.
    """
    if m_points < 2 * n_max + 2:
        raise ValueError(
            f"m_points={m_points} too small for n_max={n_max} (need >= {2 * n_max + 2})"
        )
    buf = np.zeros(coeffs.shape[:-1] + (m_points,), dtype=np.complex128)
    idx = np.arange(-n_max, n_max + 1) % m_points
    buf[..., idx] = coeffs
    return np.fft.ifft(buf, axis=-1) * m_points


def analyze(values: np.ndarray, n_max: int) -> np.ndarray:
    """Recover coefficient rows c_n, |n| <= N, from batched grid values."""
    m_points = values.shape[-1]
    if m_points < 2 * n_max + 2:
        raise ValueError(
            f"{m_points} samples cannot resolve n_max={n_max} (need >= {2 * n_max + 2})"
        )
    spec = np.fft.fft(values, axis=-1) / m_points
    idx = np.arange(-n_max, n_max + 1) % m_points
    return spec[..., idx]


def to_physical(f: TorusField, grid: GridConfig) -> np.ndarray:
    """Complex sample vector u(x_j) on the equispaced grid."""
    return synthesize(f.coeffs[np.newaxis, :], f.n_max, grid.m_points)[0]


def from_physical(samples: np.ndarray, n_max: int) -> TorusField:
    """Inverse of ``to_physical``; exact round-trip when M >= 2N+2.

    Real-dtype input produces a real_valued field with exact conjugate
    symmetry (via the half-spectrum transform).
    """
    samples = np.asarray(samples)
    if samples.ndim != 1:
        raise ValueError("samples must be a 1-d vector")
    m = samples.shape[0]
    if m < 2 * n_max + 2:
        raise ValueError(
            f"{m} samples cannot resolve n_max={n_max} (need >= {2 * n_max + 2})"
        )
    if np.isrealobj(samples):
        half = np.fft.rfft(samples.astype(np.float64)) / m
        c = np.zeros(2 * n_max + 1, dtype=np.complex128)
        c[n_max:] = half[: n_max + 1]
        c[:n_max] = np.conj(half[1: n_max + 1][::-1])
        return TorusField(n_max, c, real_valued=True)
    return TorusField(n_max, analyze(samples[np.newaxis, :], n_max)[0], real_valued=False)


def pointwise_product(f: TorusField, g: TorusField, n_out: int | None = None) -> TorusField:
    """Exact coefficients of the pointwise product u*v up to |n| <= n_out.

    Computed on a zero-padded grid large enough that no aliased copy of the
    degree-(N_f + N_g) product lands inside the output band.
    """
    if n_out is None:
        n_out = f.n_max + g.n_max
    need = f.n_max + g.n_max + n_out + 1
    m = 2
    while m < need:
        m *= 2
    uf = synthesize(f.coeffs[np.newaxis, :], f.n_max, m)[0]
    ug = synthesize(g.coeffs[np.newaxis, :], g.n_max, m)[0]
    prod = analyze((uf * ug)[np.newaxis, :], n_out)[0]
    return TorusField(n_out, prod, f.real_valued and g.real_valued)


def field_to_json(f: TorusField) -> dict:
    """JSON object {n_max, real_valued, coeffs: [[re, im], ...]}."""
    return {
        "n_max": f.n_max,
        "real_valued": f.real_valued,
        "coeffs": [[float(c.real), float(c.imag)] for c in f.coeffs],
    }


def field_from_json(obj: dict) -> TorusField:
    c = np.array([complex(re, im) for re, im in obj["coeffs"]], dtype=np.complex128)
    return TorusField(int(obj["n_max"]), c, bool(obj["real_valued"]))
