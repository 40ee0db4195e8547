"""Shared fixtures-in-spirit: reference parameter sets, samplers, and oracles.

The oracles here (interval bisection, fixed-step RK4, Dirichlet simplex
sampling) are deliberately independent of the library's own numerics so the
tests check the implementation against something it does not share code with.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from sirsvp import ModelParams, validate_params

# ── canonical parameter sets used throughout ─────────────────────────────

REF = dict(b=1.0, beta=3.0, nu=1.0 / 3.0, delta=1.0, p=1.0 / 3.0, alpha=1.0,
           mu0=0.2, k=0.1)
# same epidemic constants, transmission lowered below threshold (r0 = 0.75)
REF_DFE = {**REF, "beta": 1.5}
# certified exactly on the i_u == rho boundary (gamma=5, rho=0.5, i_u=0.5)
BOUNDARY = dict(b=1.0, beta=6.0, nu=0.5, delta=4.0, p=0.5, alpha=1.0,
                mu0=0.2, k=0.1)
# high transmission, omega not invariant (i_u = 15/16 > rho = 0.5)
UNCERTIFIED = {**BOUNDARY, "beta": 20.0}
# uncertified set whose certificate genuinely fails on the full simplex
# (small beta - delta lets the positive term win above i = rho)
VIOLATING = dict(b=0.5, beta=4.3, nu=0.05, delta=4.0, p=0.9, alpha=1.5,
                 mu0=0.1, k=0.1)
# reference epidemic constants with heavy baseline mortality: extinction
REF_EXTINCTION = {**REF, "mu0": 0.7}


def make(d: dict) -> ModelParams:
    return validate_params(**d)


# ── frozen oracle values (computed by the oracles below; see the tests) ──

# reference set: i_e = (3 - sqrt 5)/2, r_e = nu i_e / (delta (rho - i_e))
I_E_REF = 0.38196601125010515
R_E_REF = 0.07868932583326323
S_E_REF = 0.5393446629166316
N_E_REF = 4.180339887498949          # (b - delta*i_e - mu0)/k for mu0=0.2, k=0.1
# boundary set: i_e = (11 - sqrt 57)/16
I_E_BOUNDARY = 0.21563534779557814
R_E_BOUNDARY = 0.09478821740147395
# endemic certificate at (i, r) = (0.5, 0.1) for the reference set
L1_REF_POINT = 0.01517952974883334
L2_REF_POINT = 0.0016533489967254233
LEE_REF_POINT = 0.016832878745558763
LEE_ORBITAL_REF_POINT = -0.032824091990596854


# ── independent numeric oracles ──────────────────────────────────────────

def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                tol: float = 1e-12, max_iter: int = 400) -> float:
    """Plain interval bisection; requires a sign change on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    assert flo * fhi < 0.0, f"no sign change on [{lo}, {hi}]"
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def rk4_step(f: Callable[[float, Sequence[float]], Sequence[float]],
             t: float, y: Sequence[float], h: float) -> list[float]:
    """One classic fixed-step RK4 step (finite-difference oracle helper)."""
    n = len(y)
    k1 = f(t, y)
    k2 = f(t + h / 2, [y[i] + h / 2 * k1[i] for i in range(n)])
    k3 = f(t + h / 2, [y[i] + h / 2 * k2[i] for i in range(n)])
    k4 = f(t + h, [y[i] + h * k3[i] for i in range(n)])
    return [y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(n)]


def rk4_path(f, y0: Sequence[float], t_end: float, steps: int) -> list[float]:
    """Fixed-step RK4 endpoint, independent of the library integrator."""
    y = list(y0)
    h = t_end / steps
    t = 0.0
    for _ in range(steps):
        y = rk4_step(f, t, y, h)
        t += h
    return y


# ── random model inputs ──────────────────────────────────────────────────

def random_simplex(rng: np.random.Generator, interior_min: float = 0.0) -> tuple:
    """One point of the unit simplex; optionally bounded away from the faces."""
    while True:
        s, i, r = rng.dirichlet((1.5, 1.5, 1.5))
        if min(s, i, r) >= interior_min:
            return (float(s), float(i), float(r))


def sample_params(rng: np.random.Generator, r0_lo: float, r0_hi: float) -> ModelParams:
    """Random valid parameters with the threshold ratio in [r0_lo, r0_hi]."""
    b = rng.uniform(0.3, 1.5)
    p = rng.uniform(0.05, 0.9)
    nu = rng.uniform(0.2, 1.5)
    delta = rng.uniform(0.3, 2.0)
    alpha = rng.uniform(0.3, 1.5)
    gamma = (1.0 - p) * b + nu + delta
    beta = gamma * rng.uniform(r0_lo, r0_hi)
    mu0 = b * rng.uniform(0.1, 0.8)
    k = rng.uniform(0.02, 0.5)
    return validate_params(b=b, beta=beta, nu=nu, delta=delta, p=p, alpha=alpha,
                           mu0=mu0, k=k)


def sample_subthreshold_params(rng: np.random.Generator) -> ModelParams:
    """Random parameters with r0 <= 0.9 (fast approach to the disease-free state)."""
    return sample_params(rng, 0.25, 0.9)


def sample_supthreshold_params(rng: np.random.Generator) -> ModelParams:
    """Random parameters with r0 > 1 (endemic state exists)."""
    return sample_params(rng, 1.05, 5.0)


def sample_certified_params(rng: np.random.Generator) -> ModelParams:
    """Random parameters in the certified endemic regime, with margin.

    Margin (rho >= 1.1 or i_u <= 0.9 rho, r0 >= 1.3) keeps the attraction
    fast enough that bounded-horizon convergence tests are not flaky.
    """
    while True:
        params = sample_params(rng, 1.3, 4.0)
        gamma = (1.0 - params.p) * params.b + params.nu + params.delta
        rho = (params.b + params.alpha) / params.delta
        i_u = (params.beta - gamma) / (params.beta - params.delta)
        if rho >= 1.1 or i_u <= 0.9 * rho:
            return params


def sample_low_rho_params(rng: np.random.Generator) -> ModelParams:
    """Random r0 > 1 parameters with rho < 1 (the regime split is live)."""
    while True:
        b = rng.uniform(0.3, 1.0)
        alpha = rng.uniform(0.3, 1.0)
        delta = (b + alpha) / rng.uniform(0.3, 0.95)
        p = rng.uniform(0.05, 0.9)
        nu = rng.uniform(0.2, 1.5)
        gamma = (1.0 - p) * b + nu + delta
        beta = gamma * rng.uniform(1.05, 6.0)
        mu0 = b * rng.uniform(0.1, 0.8)
        try:
            return validate_params(b=b, beta=beta, nu=nu, delta=delta, p=p,
                                   alpha=alpha, mu0=mu0, k=rng.uniform(0.02, 0.5))
        except Exception:
            continue


def sample_omega_point(rng: np.random.Generator, rho: float) -> tuple[float, float]:
    """Interior point of {i < rho} within the reduced domain, away from faces."""
    i_hi = 0.9 * min(rho, 1.0)
    while True:
        i = rng.uniform(0.02, i_hi)
        r = rng.uniform(0.02, 0.96)
        if i + r <= 0.96:
            return (float(i), float(r))
