"""Independent oracles used to validate the library's fast paths.

Everything here recomputes quantities by a different route than the code
under test: dense quadrature instead of exact collocation, direct O(N^2)
convolution instead of padded FFTs, rejection sampling instead of
importance weighting, and a general-purpose constrained optimizer instead
of the per-mode Lagrange formula.
"""

import numpy as np
from scipy.optimize import minimize

from gibbsflow.spectral import TorusField


def dense_quadrature_lp(f: TorusField, p: float, m: int = 16384) -> float:
    """Riemann sum of |u(x)|^p on a dense grid, built without FFTs."""
    x = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    n = np.arange(-f.n_max, f.n_max + 1)
    u = f.coeffs @ np.exp(1j * np.outer(n, x))
    return float(2.0 * np.pi * np.mean(np.abs(u) ** p))


def brute_convolution(f: TorusField, g: TorusField) -> np.ndarray:
    """O(N^2) coefficient convolution of the pointwise product f*g."""
    n_out = f.n_max + g.n_max
    out = np.zeros(2 * n_out + 1, dtype=np.complex128)
    for a in range(-f.n_max, f.n_max + 1):
        for b in range(-g.n_max, g.n_max + 1):
            out[a + b + n_out] += f.coeffs[a + f.n_max] * g.coeffs[b + g.n_max]
    return out


def rejection_sample_gibbs(spec, m, seed_rng, grid, max_batches=10000):
    """Exact draws from a defocusing Gibbs spec by accept/reject.

    The defocusing density relative to the base is exp(log weight) <= 1,
    so accepting with that probability is exact.  Only workable at small
    truncations where the acceptance rate is reasonable.
    """
    from gibbsflow.fields import sample_matrix
    from gibbsflow.measures import gibbs_log_weight_matrix

    rows = []
    for _ in range(max_batches):
        c = sample_matrix(spec.base, 256, seed_rng)
        log_w, within = gibbs_log_weight_matrix(c, spec, grid)
        accept = within & (np.log(seed_rng.random(256)) < log_w)
        rows.append(c[accept])
        if sum(r.shape[0] for r in rows) >= m:
            break
    got = np.concatenate(rows, axis=0)
    if got.shape[0] < m:
        raise RuntimeError("rejection sampler did not reach the target count")
    return got[:m]


def slsqp_ball_minimum(center, radius, s, v0, weights=None):
    """Constrained minimum of (1/2) sum w |f - v0|^2 over the H^s ball,
    via SLSQP on stacked real/imaginary coordinates."""
    n_max = max(center.n_max, v0.n_max)

    def emb(f):
        c = np.zeros(2 * n_max + 1, dtype=np.complex128)
        c[n_max - f.n_max: n_max + f.n_max + 1] = f.coeffs
        return c

    wc, vc = emb(center), emb(v0)
    n = np.arange(-n_max, n_max + 1, dtype=np.float64)
    omega = (1.0 + n * n) ** s
    w = np.ones_like(omega) if weights is None else np.asarray(weights, float)

    def split(z):
        half = z.size // 2
        return z[:half] + 1j * z[half:]

    def objective(z):
        f = split(z)
        return 0.5 * float(np.sum(w * np.abs(f - vc) ** 2))

    def constraint(z):
        f = split(z)
        return radius ** 2 - float(np.sum(omega * np.abs(f - wc) ** 2))

    # Two starts: the ball center and v0 pulled radially inside the ball.
    d = vc - wc
    dist = np.sqrt(np.sum(omega * np.abs(d) ** 2))
    pulled = wc + d * min(1.0, 0.999 * radius / max(dist, 1e-300))
    best = np.inf
    for start in (wc, pulled):
        z0 = np.concatenate([start.real, start.imag])
        res = minimize(
            objective, z0, method="SLSQP",
            constraints=[{"type": "ineq", "fun": constraint}],
            options={"maxiter": 1000, "ftol": 1e-14},
        )
        # A line-search stall at numerical precision still yields the
        # optimum; only infeasible results are rejected.
        if constraint(res.x) >= -1e-9:
            best = min(best, float(res.fun))
    if not np.isfinite(best):
        raise RuntimeError("SLSQP produced no feasible point")
    return best
