"""Pseudospectral integrators for the three truncated equation families.

Sign conventions (s = +1 for "plus", -1 for "minus"):

    nls       i u_t - u_xx + s |u|^(p-2) u = 0
    wick_nls  i u_t - u_xx + s u (|u|^2 - 2 avg|u|^2) = 0   (p = 4)
    gkdv      u_t + u_xxx - s u^(p-2) u_x = 0

For the Schroedinger families s = +1 is the defocusing case and the
conserved energy is (1/2) int |u_x|^2 + (s/p) int |u|^p (the Wick variant
subtracts the mass-squared term, see ``hamiltonian``).  For gkdv, s = +1
pairs with + (1/(p(p-1))) int u^p in the energy.

Schemes: Strang splitting for the Schroedinger families (exact linear
phases around an exact pointwise nonlinear rotation, evaluated on the
padded grid) and integrating-factor classical RK4 for gkdv with the
nonlinearity in conservation form d_x(u^(p-1))/(p-1), dealiased by
padding.  With galerkin_projected the nonlinearity is re-truncated to the
initial band |n| <= N every evaluation and each step is projected back
onto its mass sphere, so the discrete flow conserves mass to roundoff --
the structural properties the invariance experiments rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    GridConfig,
    TorusField,
    default_grid,
    lp_integral,
    lp_min_points,
    mean_square,
    synthesize,
    analyze,
    truncate,
)

__all__ = [
    "EquationSpec",
    "SolverConfig",
    "TrajectoryRecord",
    "EnsembleEvolution",
    "linear_propagate",
    "evolve",
    "evolve_ensemble",
    "hamiltonian",
    "mass",
    "momentum",
    "gauge_check",
    "GaugeReport",
    "default_solver_grid",
]

FAMILIES = ("nls", "wick_nls", "gkdv")

BLOWUP_LINF = 1.0e6
# Accuracy guards, validated per run: dt * N^2 for Strang splitting
# (nonlinear phase must stay resolved) and dt * N^3 for the IF-RK4 Airy
# step (the integrating factor removes the linear stiffness; the guard
# covers the advective nonlinearity).
STRANG_DT_N2_BOUND = 1.0
AIRY_DT_N3_BOUND = 8.0


@dataclass(frozen=True)
class EquationSpec:
    """Which truncated flow to integrate."""

    family: str
    p: int = 4
    sign: str = "plus"
    galerkin_projected: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected {FAMILIES}")
        if self.sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {self.sign!r}")
        if self.family == "wick_nls" and self.p != 4:
            raise ValueError("wick_nls is cubic by definition (p = 4)")
        if self.p < 3:
            raise ValueError("p must be >= 3")

    @property
    def s(self) -> float:
        return 1.0 if self.sign == "plus" else -1.0


@dataclass(frozen=True)
class SolverConfig:
    """Time step, horizon, grid, and recording cadence."""

    dt: float
    t_final: float
    grid: GridConfig | None = None
    scheme: str | None = None  # default picked per family
    record_every: int = 0  # 0: record endpoints only

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.record_every < 0:
            raise ValueError("record_every must be >= 0")
        if self.scheme not in (None, "strang_split", "if_rk4"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass(frozen=True)
class TrajectoryRecord:
    """Snapshots and conserved-quantity series for one trajectory."""

    times: np.ndarray
    fields: tuple
    mass_series: np.ndarray
    hamiltonian_series: np.ndarray
    blowup: bool
    last_valid_time: float
    dt_effective: float


@dataclass(frozen=True)
class EnsembleEvolution:
    """Final states of a batched run, with per-sample blowup flags."""

    coeffs: np.ndarray
    n_max: int
    real_valued: bool
    blowup: np.ndarray  # bool per row
    last_valid_time: np.ndarray
    dt_effective: float


def default_solver_grid(n_max: int, p: int) -> GridConfig:
    """Power-of-two grid large enough for alias-free degree-(p-1) products."""
    pad = 1.5 if p <= 3 else 2.0
    grid = default_grid(n_max, pad)
    while grid.m_points < p * n_max + 1:
        grid = GridConfig(grid.m_points * 2, pad)
    return grid


def linear_propagate(f: TorusField, t: float, family: str) -> TorusField:
    """Exact linear group: c_n -> e^{i n^2 t} c_n (Schroedinger families)
    or c_n -> e^{i n^3 t} c_n (Airy)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    n = f.modes.astype(np.float64)
    power = 3 if family == "gkdv" else 2
    phase = np.exp(1j * n ** power * t)
    return TorusField(f.n_max, phase * f.coeffs, f.real_valued and family == "gkdv")


def _scheme_for(eq: EquationSpec, cfg: SolverConfig) -> str:
    scheme = cfg.scheme or ("if_rk4" if eq.family == "gkdv" else "strang_split")
    if eq.family == "gkdv" and scheme != "if_rk4":
        raise ValueError("gkdv runs use the if_rk4 scheme")
    if eq.family != "gkdv" and scheme != "strang_split":
        raise ValueError("Schroedinger families use the strang_split scheme")
    return scheme


def _working_truncation(n_max: int, eq: EquationSpec, grid: GridConfig) -> int:
    """Band the state lives in: the data band if projected, else the
    largest band the grid can multiply without aliasing."""
    capacity = (grid.m_points - 1) // eq.p
    if capacity < n_max:
        raise ValueError(
            f"grid with {grid.m_points} points cannot evolve n_max={n_max} "
            f"alias-free for p={eq.p}; need m_points >= {eq.p * n_max + 1}"
        )
    return n_max if eq.galerkin_projected else capacity


def _steps(cfg: SolverConfig) -> tuple[int, float]:
    n_steps = max(1, int(round(abs(cfg.t_final) / cfg.dt)))
    dt_eff = abs(cfg.t_final) / n_steps
    return n_steps, math.copysign(dt_eff, cfg.t_final) if cfg.t_final != 0 else dt_eff


def _check_guard(eq: EquationSpec, dt: float, k_work: int) -> None:
    if eq.family == "gkdv":
        if dt * k_work ** 3 > AIRY_DT_N3_BOUND:
            raise ValueError(
                f"dt={dt:g} violates the if_rk4 guard dt*N^3 <= {AIRY_DT_N3_BOUND}"
                f" at N={k_work}"
            )
    elif dt * k_work ** 2 > STRANG_DT_N2_BOUND:
        raise ValueError(
            f"dt={dt:g} violates the strang guard dt*N^2 <= {STRANG_DT_N2_BOUND}"
            f" at N={k_work}"
        )


def _synth_real(half: np.ndarray, m_points: int) -> np.ndarray:
    buf = np.zeros(half.shape[:-1] + (m_points // 2 + 1,), dtype=np.complex128)
    buf[..., : half.shape[-1]] = half * m_points
    return np.fft.irfft(buf, n=m_points, axis=-1)


def _analyze_real(u: np.ndarray, k: int) -> np.ndarray:
    return np.fft.rfft(u, axis=-1)[..., : k + 1] / u.shape[-1]


class _StrangStepper:
    """Batched Strang splitting for nls / wick_nls on complex coefficients."""

    def __init__(self, eq: EquationSpec, grid: GridConfig, k_work: int, dt: float):
        self.eq = eq
        self.grid = grid
        self.k = k_work
        n = np.arange(-k_work, k_work + 1, dtype=np.float64)
        self.phase_half = np.exp(1j * n ** 2 * (dt / 2.0))
        self.dt = dt
        self.exponent = (eq.p - 2) / 2.0

    def step(self, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One step; returns (new coeffs, per-row max |u|^2 seen)."""
        eq = self.eq
        c = c * self.phase_half
        u = synthesize(c, self.k, self.grid.m_points)
        absq = np.abs(u) ** 2
        peak = np.max(absq, axis=-1)
        if eq.family == "wick_nls":
            ms = np.sum(np.abs(c) ** 2, axis=-1)
            theta = absq - 2.0 * ms[:, np.newaxis]
        elif self.exponent == 1.0:
            theta = absq
        else:
            theta = absq ** self.exponent
        u = u * np.exp(1j * (eq.s * self.dt) * theta)
        before = np.sum(np.abs(c) ** 2, axis=-1)
        c = analyze(u, self.k)
        if eq.galerkin_projected:
            after = np.sum(np.abs(c) ** 2, axis=-1)
            scale = np.ones_like(after)
            ok = after > 0.0
            scale[ok] = np.sqrt(before[ok] / after[ok])
            c = c * scale[:, np.newaxis]
        c = c * self.phase_half
        return c, peak


class _KdvStepper:
    """Batched integrating-factor RK4 for gkdv on the real half-spectrum."""

    def __init__(self, eq: EquationSpec, grid: GridConfig, k_work: int, dt: float):
        self.eq = eq
        self.grid = grid
        self.k = k_work
        n = np.arange(0, k_work + 1, dtype=np.float64)
        lin = 1j * n ** 3
        self.e_half = np.exp(lin * (dt / 2.0))
        self.e_full = self.e_half ** 2
        self.deriv = eq.s * (1j * n) / (eq.p - 1)
        self.dt = dt
        self._peak = None

    def _nonlinear(self, h: np.ndarray) -> np.ndarray:
        u = _synth_real(h, self.grid.m_points)
        self._peak = np.maximum(self._peak, np.max(u * u, axis=-1))
        w = u ** (self.eq.p - 1)
        return self.deriv * _analyze_real(w, self.k)

    def step(self, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        self._peak = np.zeros(h.shape[0])
        dt, e1, e2 = self.dt, self.e_half, self.e_full
        k1 = self._nonlinear(h)
        k2 = np.conj(e1) * self._nonlinear(e1 * (h + 0.5 * dt * k1))
        k3 = np.conj(e1) * self._nonlinear(e1 * (h + 0.5 * dt * k2))
        k4 = np.conj(e2) * self._nonlinear(e2 * (h + dt * k3))
        h_new = e2 * (h + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        if self.eq.galerkin_projected:
            before = np.sum(np.abs(h[..., 1:]) ** 2, axis=-1)
            after = np.sum(np.abs(h_new[..., 1:]) ** 2, axis=-1)
            scale = np.ones_like(after)
            ok = after > 0.0
            scale[ok] = np.sqrt(before[ok] / after[ok])
            h_new = h_new.copy()
            h_new[..., 1:] *= scale[:, np.newaxis]
        return h_new, self._peak


def _to_half(coeffs: np.ndarray, k: int) -> np.ndarray:
    return coeffs[..., k:].copy()


def _from_half(half: np.ndarray, k: int) -> np.ndarray:
    full = np.empty(half.shape[:-1] + (2 * k + 1,), dtype=np.complex128)
    full[..., k:] = half
    full[..., :k] = np.conj(half[..., 1:][..., ::-1])
    full[..., k] = full[..., k].real  # exact real mean
    return full


def evolve_ensemble(
    coeffs: np.ndarray,
    n_max: int,
    eq: EquationSpec,
    cfg: SolverConfig,
    real_valued: bool = False,
    on_record=None,
) -> EnsembleEvolution:
    """Evolve a batch of coefficient rows under the truncated flow.

    Rows that blow up (L-inf above 1e6 or non-finite) are frozen at their
    last valid state and flagged; this is a recorded outcome, not an
    error.  ``on_record(t, full_coeffs, active)`` is called at the
    recording cadence, including t=0 and the final time.
    """
    if eq.family == "gkdv" and not real_valued:
        raise ValueError("gkdv evolves real_valued fields only")
    grid = cfg.grid or default_solver_grid(n_max, eq.p)
    k_work = _working_truncation(n_max, eq, grid)
    n_steps, dt = _steps(cfg)
    _check_guard(eq, abs(dt), k_work)

    batch = coeffs.shape[0]
    full = np.zeros((batch, 2 * k_work + 1), dtype=np.complex128)
    full[:, k_work - n_max: k_work + n_max + 1] = coeffs

    use_half = eq.family == "gkdv"
    state = _to_half(full, k_work) if use_half else full
    stepper = (_KdvStepper if use_half else _StrangStepper)(eq, grid, k_work, dt)

    active = np.ones(batch, dtype=bool)
    last_valid = np.full(batch, abs(cfg.t_final))
    frozen = state.copy()

    def emit(step_index: int):
        if on_record is not None:
            t = step_index * dt
            cur = _from_half(state, k_work) if use_half else state
            on_record(t, cur, active.copy())

    emit(0)
    record_every = cfg.record_every if cfg.record_every > 0 else n_steps
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for step in range(1, n_steps + 1):
            new_state, peak = stepper.step(state)
            blown = active & (~np.isfinite(peak) | (peak > BLOWUP_LINF ** 2))
            row_ok = np.all(np.isfinite(new_state), axis=-1)
            blown |= active & ~row_ok
            if np.any(blown):
                last_valid[blown] = (step - 1) * abs(dt)
                active &= ~blown
            state = new_state
            state[~active] = frozen[~active]
            frozen = state
            if step % record_every == 0 or step == n_steps:
                emit(step)

    final = _from_half(state, k_work) if use_half else state
    return EnsembleEvolution(
        coeffs=final,
        n_max=k_work,
        real_valued=real_valued,
        blowup=~active,
        last_valid_time=last_valid,
        dt_effective=dt,
    )


def evolve(f0: TorusField, eq: EquationSpec, cfg: SolverConfig) -> TrajectoryRecord:
    """Integrate one initial field, recording snapshots and invariants."""
    grid = cfg.grid or default_solver_grid(f0.n_max, eq.p)
    cfg = SolverConfig(cfg.dt, cfg.t_final, grid, cfg.scheme, cfg.record_every)
    times: list[float] = []
    fields: list[TorusField] = []

    real = f0.real_valued and eq.family == "gkdv"

    def on_record(t, full, active):
        times.append(t)
        k = (full.shape[-1] - 1) // 2
        row = full[0]
        if real:
            row = (row + np.conj(row[::-1])) / 2.0  # kill roundoff asymmetry
        fields.append(TorusField(k, row, real))

    result = evolve_ensemble(
        f0.coeffs[np.newaxis, :], f0.n_max, eq, cfg,
        real_valued=f0.real_valued, on_record=on_record,
    )
    mass_series = np.array([mass(f) for f in fields])
    ham_series = np.array([hamiltonian(f, eq, grid) for f in fields])
    return TrajectoryRecord(
        times=np.array(times),
        fields=tuple(fields),
        mass_series=mass_series,
        hamiltonian_series=ham_series,
        blowup=bool(result.blowup[0]),
        last_valid_time=float(result.last_valid_time[0]),
        dt_effective=result.dt_effective,
    )


def mass(f: TorusField) -> float:
    """int |u|^2 dx = 2 pi sum |c_n|^2 (conserved by all three flows)."""
    return 2.0 * np.pi * mean_square(f)


def momentum(f: TorusField) -> float:
    """int Im(conj(u) u_x) dx = 2 pi sum n |c_n|^2."""
    n = f.modes.astype(np.float64)
    return float(2.0 * np.pi * np.sum(n * np.abs(f.coeffs) ** 2))


def hamiltonian(f: TorusField, eq: EquationSpec, grid: GridConfig | None = None) -> float:
    """Conserved energy of the truncated flow (see module conventions)."""
    grid = grid or default_solver_grid(f.n_max, eq.p)
    n = f.modes.astype(np.float64)
    kinetic = np.pi * float(np.sum(n * n * np.abs(f.coeffs) ** 2))
    s = eq.s
    if eq.family == "nls":
        return kinetic + (s / eq.p) * lp_integral(f, eq.p, grid)
    if eq.family == "wick_nls":
        quart = lp_integral(f, 4, grid)
        ms = mean_square(f)
        return kinetic + (s / 4.0) * quart - s * np.pi * ms * ms
    # gkdv: signed integral of u^p
    if not f.real_valued:
        raise ValueError("gkdv energy is defined for real_valued fields")
    required = lp_min_points(f.n_max, eq.p)
    if grid.m_points < required:
        raise ValueError(
            f"grid too small for u^{eq.p}: need m_points >= {required}"
        )
    u = synthesize(f.coeffs[np.newaxis, :], f.n_max, grid.m_points)[0].real
    signed = 2.0 * np.pi * float(np.mean(u ** eq.p))
    return kinetic + (s / (eq.p * (eq.p - 1))) * signed


@dataclass(frozen=True)
class GaugeReport:
    """Pointwise comparison of the plain and Wick-ordered cubic flows."""

    gamma: float
    modulus_discrepancy: float
    phase_residual: float
    times: np.ndarray
    blowup: bool


def gauge_check(u0: TorusField, t_final: float, cfg: SolverConfig,
                sign: str = "plus") -> GaugeReport:
    """Verify the gauge link u_wick(t) = e^{i gamma t} u_nls(t).

    gamma = -2 s avg|u0|^2 uses the conserved mean of |u|^2, so for
    resolved runs both the modulus discrepancy and the phase residual are
    pure solver error.
    """
    eq_nls = EquationSpec("nls", p=4, sign=sign)
    eq_wick = EquationSpec("wick_nls", p=4, sign=sign)
    cfg = SolverConfig(cfg.dt, t_final, cfg.grid, None,
                       cfg.record_every or max(1, int(round(abs(t_final) / cfg.dt)) // 8))
    traj_a = evolve(u0, eq_nls, cfg)
    traj_b = evolve(u0, eq_wick, cfg)
    gamma = -2.0 * eq_nls.s * mean_square(u0)
    grid = cfg.grid or default_solver_grid(u0.n_max, 4)
    mod_disc = 0.0
    phase_resid = 0.0
    for t, fa, fb in zip(traj_a.times, traj_a.fields, traj_b.fields):
        ua = synthesize(fa.coeffs[np.newaxis, :], fa.n_max, grid.m_points)[0]
        ub = synthesize(fb.coeffs[np.newaxis, :], fb.n_max, grid.m_points)[0]
        mod_disc = max(mod_disc, float(np.max(np.abs(np.abs(ua) - np.abs(ub)))))
        phase_resid = max(
            phase_resid, float(np.max(np.abs(ub - np.exp(1j * gamma * t) * ua)))
        )
    return GaugeReport(
        gamma=gamma,
        modulus_discrepancy=mod_disc,
        phase_residual=phase_resid,
        times=traj_a.times,
        blowup=traj_a.blowup or traj_b.blowup,
    )
