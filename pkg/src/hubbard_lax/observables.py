"""Steady-state observables: density profiles, species currents, uniformity,
and finite-size scaling fits.

Current convention. With hopping 2(s+_j s-_{j+1} + s-_j s+_{j+1}) the local
magnetization obeys d<sz_j>/dt = i<[H, sz_j]> = <J_{j-1,j}> - <J_{j,j+1}>
with

    J_{j,j+1} = 4i (s+_j s-_{j+1} - s-_j s+_{j+1}),

i.e. positive J is rightward particle flow. The factor 4 comes with the
amplitude-2 hopping; the identity i[H, sz_j] = J_{j-1,j} - J_{j,j+1} is
checked at operator level in the tests, which is what fixes both the
constant and the sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hubbard_model import SIGMA, TAU, site_operator
from .linalg import PAULI, local4
from .ness_engine import DrivingConfig, NessResult, mpo_expectation

REAL_TOL = 1e-10


@dataclass
class ObservableSet:
    n_sites: int
    densities_sigma: list
    densities_tau: list
    currents_sigma: list
    currents_tau: list
    driving: dict = field(default_factory=dict)


def expectation(rho: np.ndarray, obs) -> complex:
    """tr(rho @ obs)."""
    obs = obs.toarray() if hasattr(obs, "toarray") else np.asarray(obs)
    if rho.shape != obs.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {obs.shape}")
    return complex(np.trace(rho @ obs))


def current_operator(n: int, j: int, species: int):
    """J_{j,j+1} = 4i (x+_j x-_{j+1} - x-_j x+_{j+1}) for species x, sparse."""
    if not 1 <= j <= n - 1:
        raise ValueError(f"bond index {j} out of range 1..{n - 1}")
    return 4j * (
        site_operator(n, j, species, "+") @ site_operator(n, j + 1, species, "-")
        - site_operator(n, j, species, "-") @ site_operator(n, j + 1, species, "+")
    )


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > REAL_TOL * max(1.0, abs(z)):
        raise ValueError(f"{what} has non-negligible imaginary part {z.imag:g}")
    return float(z.real)


def profile_and_currents(ness: NessResult) -> ObservableSet:
    """Densities <sz_j>, <tz_j> and bond currents from a dense steady state."""
    n = ness.cfg.n_sites
    rho = ness.rho
    dens_s = [_real(expectation(rho, site_operator(n, j, SIGMA, "z")), f"<sz_{j}>")
              for j in range(1, n + 1)]
    dens_t = [_real(expectation(rho, site_operator(n, j, TAU, "z")), f"<tz_{j}>")
              for j in range(1, n + 1)]
    cur_s = [_real(expectation(rho, current_operator(n, j, SIGMA)), f"J_s{j}")
             for j in range(1, n)]
    cur_t = [_real(expectation(rho, current_operator(n, j, TAU)), f"J_t{j}")
             for j in range(1, n)]
    return ObservableSet(
        n_sites=n, densities_sigma=dens_s, densities_tau=dens_t,
        currents_sigma=cur_s, currents_tau=cur_t,
        driving=vars(ness.cfg).copy() if hasattr(ness.cfg, "__dict__") else {
            "gamma_L": ness.cfg.gamma_L, "gamma_R": ness.cfg.gamma_R,
            "mu_L": ness.cfg.mu_L, "mu_R": ness.cfg.mu_R,
            "u": ness.cfg.u, "n_sites": n,
        },
    )


# local 4x4 blocks for the expectation engine
_SZ_LOC = {SIGMA: local4("z", "0"), TAU: local4("0", "z")}
_PLUS_LOC = {SIGMA: local4("+", "0"), TAU: local4("0", "+")}
_MINUS_LOC = {SIGMA: local4("-", "0"), TAU: local4("0", "-")}


def profile_and_currents_mpo(cfg: DrivingConfig, cutoff_K=None) -> ObservableSet:
    """Same observables evaluated through the pair-transfer engine; never
    builds rho, usable to n = 8."""
    n = cfg.n_sites
    dens = {SIGMA: [], TAU: []}
    curr = {SIGMA: [], TAU: []}
    for sp in (SIGMA, TAU):
        for j in range(1, n + 1):
            z = mpo_expectation(cfg, {j: _SZ_LOC[sp]}, cutoff_K)
            dens[sp].append(_real(z, f"<z_{j}>"))
        for j in range(1, n):
            pm = mpo_expectation(cfg, {j: _PLUS_LOC[sp], j + 1: _MINUS_LOC[sp]}, cutoff_K)
            mp = mpo_expectation(cfg, {j: _MINUS_LOC[sp], j + 1: _PLUS_LOC[sp]}, cutoff_K)
            curr[sp].append(_real(4j * (pm - mp), f"J_{j}"))
    return ObservableSet(
        n_sites=n, densities_sigma=dens[SIGMA], densities_tau=dens[TAU],
        currents_sigma=curr[SIGMA], currents_tau=curr[TAU],
        driving={
            "gamma_L": cfg.gamma_L, "gamma_R": cfg.gamma_R,
            "mu_L": cfg.mu_L, "mu_R": cfg.mu_R, "u": cfg.u, "n_sites": n,
        },
    )


def current_uniformity(obs: ObservableSet) -> float:
    """max_j |J_j - J_1| / |J_1| over both species."""
    worst = 0.0
    for series in (obs.currents_sigma, obs.currents_tau):
        if len(series) < 2:
            continue
        ref = series[0]
        if ref == 0.0:
            worst = max(worst, max(abs(x) for x in series))
            continue
        worst = max(worst, max(abs(x - ref) for x in series) / abs(ref))
    return worst


def current_series(base: DrivingConfig, n_values) -> list:
    """(n, J_sigma at the first bond) along a family of chain lengths,
    computed with the pair-transfer engine."""
    out = []
    for n in n_values:
        cfg = DrivingConfig(base.gamma_L, base.gamma_R, base.mu_L, base.mu_R,
                            base.u, int(n))
        pm = mpo_expectation(cfg, {1: _PLUS_LOC[SIGMA], 2: _MINUS_LOC[SIGMA]})
        mp = mpo_expectation(cfg, {1: _MINUS_LOC[SIGMA], 2: _PLUS_LOC[SIGMA]})
        out.append((int(n), _real(4j * (pm - mp), "J")))
    return out


def scaling_fit(series) -> dict:
    """Least-squares slope of log|J| against log n.

    Refuses a series whose currents change sign (the log-log fit would be
    meaningless)."""
    if len(series) < 3:
        raise ValueError("need at least 3 points for a scaling fit")
    ns = np.array([p[0] for p in series], dtype=float)
    js = np.array([p[1] for p in series], dtype=float)
    if np.any(js == 0) or (np.sign(js) != np.sign(js[0])).any():
        raise ValueError("current changes sign across the series; fit refused")
    x, y = np.log(ns), np.log(np.abs(js))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"exponent": float(coef[0]), "r_squared": r2}


def cosine_profile_fit(profile) -> dict:
    """Fit <z_j> to a cos(pi (j - 1/2) / n) + b; reports amplitude, offset,
    and goodness of fit (no pass/fail threshold attached)."""
    y = np.asarray(profile, dtype=float)
    n = len(y)
    j = np.arange(1, n + 1)
    c = np.cos(np.pi * (j - 0.5) / n)
    A = np.vstack([c, np.ones_like(c)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"amplitude": float(coef[0]), "offset": float(coef[1]), "r_squared": r2}
