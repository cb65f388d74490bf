"""Spectral-shape analysis: the analytic exponents f_A, f_D, their g envelope,
grid recursions for the (restricted) spectral shape functions, and the
critical-point solver that reproduces the distance table.

Index convention for the recursion: m = 1 is the repetition-only base table
h(gamma)/r; each increment applies one more maximization step (one
permute-accumulate for family A, one round-pair for AD/DA).  The distance
solver's m counts accumulate rounds instead, so the table matching the
m-round code has recursion index m + 1.

Scalar f_A / f_D return NaN outside their domains (never a silent 0); grid
code uses -inf internally so out-of-domain points lose every maximization.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import inf, isnan, log2, nan
from typing import Literal, Optional, Sequence

import numpy as np

GRID_STEP_MIN = 1e-5
GRID_STEP_MAX = 1e-2
RECURSION_MAX_M = 8
GV_HALF = None  # filled lazily by gv_delta()


def entropy(x: float) -> float:
    """Binary entropy h(x) in bits, with h(0) = h(1) = 0 by the 0 log 0 := 0 convention."""
    if x < 0.0 or x > 1.0:
        raise ValueError("entropy defined on [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * log2(x) + (1.0 - x) * log2(1.0 - x))


def entropy_inverse(y: float) -> float:
    """The branch of h^{-1} in [0, 1/2], by bisection to 1e-12."""
    if y < 0.0 or y > 1.0:
        raise ValueError("entropy_inverse defined on [0, 1]")
    lo, hi = 0.0, 0.5
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gv_delta(rate: float = 0.5) -> float:
    """Best known achievable relative distance at the given rate: h^{-1}(1 - R)."""
    return entropy_inverse(1.0 - rate)


def _h_arr(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(x * np.log2(x) + (1.0 - x) * np.log2(1.0 - x))
    out = np.where((x == 0.0) | (x == 1.0), 0.0, out)
    return np.where((x < 0.0) | (x > 1.0), np.nan, out)


def f_A(alpha: float, beta: float) -> float:
    """Exponent of the accumulate transition; NaN outside alpha/2 <= beta <= 1 - alpha/2."""
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        return nan
    if beta < alpha / 2 or beta > 1.0 - alpha / 2:
        return nan
    if alpha == 1.0:
        return 1.0 - entropy(beta)  # domain forces beta = 1/2, value 0
    u = (beta - alpha / 2) / (1.0 - alpha)
    u = min(max(u, 0.0), 1.0)
    return alpha - entropy(beta) + (1.0 - alpha) * entropy(u)


def f_D(alpha: float, beta: float) -> float:
    """Exponent of the derivative transition; NaN outside beta/2 <= alpha <= 1 - beta/2."""
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        return nan
    if alpha < beta / 2 or alpha > 1.0 - beta / 2:
        return nan
    t1 = (1.0 - alpha) * entropy(min(beta / (2.0 * (1.0 - alpha)), 1.0)) if alpha < 1.0 else 0.0
    t2 = alpha * entropy(min(beta / (2.0 * alpha), 1.0)) if alpha > 0.0 else 0.0
    return t1 + t2 - entropy(alpha)


def f_DA(alpha: float, beta: float, gamma: float) -> float:
    """f_D(alpha, beta) + f_A(beta, gamma): one derivative-then-accumulate round."""
    return f_D(alpha, beta) + f_A(beta, gamma)


def f_AD(alpha: float, beta: float, gamma: float) -> float:
    """f_A(alpha, beta) + f_D(beta, gamma): one accumulate-then-derivative round."""
    return f_A(alpha, beta) + f_D(beta, gamma)


def g_envelope(alpha: float, gamma: float) -> float:
    """Piecewise upper envelope of f_DA and f_AD over beta, split at 2 gamma (1 - gamma)."""
    if not (0.0 <= alpha <= 1.0 and 0.0 <= gamma <= 1.0):
        raise ValueError("g_envelope defined on [0,1]^2")
    knee = 2.0 * gamma * (1.0 - gamma)
    if alpha <= knee:
        return f_A(alpha, gamma)
    if alpha >= 1.0 - knee:
        return f_A(1.0 - alpha, gamma)
    return entropy(gamma) - entropy(alpha)


def f_A_grid(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """(len(alpha), len(beta)) array of f_A values, -inf out of domain."""
    a, b = np.asarray(alpha)[:, None], np.asarray(beta)[None, :]
    safe = np.where(a < 1.0, 1.0 - a, 1.0)
    u = np.clip((b - a / 2.0) / safe, 0.0, 1.0)
    with np.errstate(invalid="ignore"):
        val = a - _h_arr(b) + (1.0 - a) * _h_arr(u)
    ok = (b >= a / 2.0 - 1e-15) & (b <= 1.0 - a / 2.0 + 1e-15)
    return np.where(ok, val, -inf)


def f_D_grid(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """(len(alpha), len(beta)) array of f_D values, -inf out of domain."""
    a, b = np.asarray(alpha)[:, None], np.asarray(beta)[None, :]
    ok = (a >= b / 2.0 - 1e-15) & (a <= 1.0 - b / 2.0 + 1e-15)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(a < 1.0, (1.0 - a) * _h_arr(np.clip(b / (2.0 * (1.0 - a) + 1e-300), 0, 1)), 0.0)
        t2 = np.where(a > 0.0, a * _h_arr(np.clip(b / (2.0 * a + 1e-300), 0, 1)), 0.0)
        val = t1 + t2 - _h_arr(a)
    return np.where(ok, val, -inf)


@dataclass(frozen=True)
class SpectralTable:
    """Discretized spectral shape over a uniform gamma grid on [0, 1]."""

    family: Literal["A", "AD", "DA"]
    m: int
    r: int
    tau: float
    grid_step: float
    gamma: np.ndarray
    values: np.ndarray

    def to_csv(self) -> str:
        lines = ["gamma,value"]
        for g, v in zip(self.gamma, self.values):
            lines.append(f"{g:.10g},{'-inf' if not np.isfinite(v) else format(v, '.12g')}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "m": self.m,
            "r": self.r,
            "tau": self.tau,
            "grid_step": self.grid_step,
            "gamma": [float(g) for g in self.gamma],
            "values": [float(v) if np.isfinite(v) else None for v in self.values],
        }


def _maxplus(prev: np.ndarray, F: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """out[j] = max_i prev[i] + F[i, j], chunked to bound the broadcast temp."""
    G = F.shape[1]
    out = np.empty(G)
    for s in range(0, G, chunk):
        e = min(s + chunk, G)
        with np.errstate(invalid="ignore"):
            out[s:e] = np.max(prev[:, None] + F[:, s:e], axis=0)
    return out


def spectral_recursion(
    family: Literal["A", "AD", "DA"],
    m: int,
    tau: float = 0.0,
    grid_step: float = 1e-3,
    r: int = 2,
) -> SpectralTable:
    """Iterated grid maximization of the (tau-restricted) spectral shape.

    m = 1 returns the base table h(gamma)/r.  Family A caps the inner
    variable at min(2 gamma, 2 (1 - gamma)) through the f_A domain; AD/DA
    maximize jointly over (alpha, beta), factorized as two max-plus products.
    """
    if not GRID_STEP_MIN <= grid_step <= GRID_STEP_MAX:
        raise ValueError(f"grid_step must be in [{GRID_STEP_MIN}, {GRID_STEP_MAX}]")
    if not 1 <= m <= RECURSION_MAX_M:
        raise ValueError(f"m must be in [1, {RECURSION_MAX_M}]")
    if not 0.0 <= tau < 0.5:
        raise ValueError("tau must be in [0, 1/2)")
    if family != "A" and r != 2:
        raise ValueError("AD/DA recursions are rate-1/2 (r = 2)")
    g = np.round(np.arange(0.0, 1.0 + grid_step / 2, grid_step), 12)
    v = _h_arr(g) / r
    if m > 1:
        FA = f_A_grid(g, g)
        FD = f_D_grid(g, g) if family != "A" else None
        window = (g >= tau - 1e-15) & (g <= 1.0 - tau + 1e-15)
        for _ in range(m - 1):
            prev = np.where(window, v, -inf)
            if family == "A":
                v = _maxplus(prev, FA)
            elif family == "DA":
                v = _maxplus(_maxplus(prev, FD), FA)
            else:
                v = _maxplus(_maxplus(prev, FA), FD)
    return SpectralTable(
        family=family, m=m, r=r, tau=tau, grid_step=grid_step, gamma=g, values=v
    )


@dataclass(frozen=True)
class DeltaEstimate:
    m: int
    method: Literal["grid", "critical_point"]
    delta: float
    certificate: dict

    def to_json(self) -> dict:
        return {"m": self.m, "method": self.method, "delta": self.delta,
                "certificate": self.certificate}


def delta_from_grid(table: SpectralTable, tol: float = 1e-9) -> DeltaEstimate:
    """Largest grid gamma below which all table values are <= tol.

    Requires an unrestricted table (tau = 0), where the flat region is an
    exact 0 by the alpha = 0 choice; tol only absorbs float noise.
    """
    if table.tau != 0.0:
        raise ValueError("delta_from_grid needs a tau = 0 table")
    half = table.gamma <= 0.5
    g, vals = table.gamma[half], table.values[half]
    above = np.where(vals > tol)[0]
    if len(above) == 0 or above[0] == 0:
        idx = 0 if len(above) else len(g) - 1
        delta = 0.0 if len(above) else float(g[-1])
        first_pos = float(g[above[0]]) if len(above) else None
    else:
        idx = above[0] - 1
        delta = float(g[idx])
        first_pos = float(g[above[0]])
    cert = {
        "grid_step": table.grid_step,
        "tol": tol,
        "value_at_delta": float(vals[idx]),
        "first_positive_gamma": first_pos,
    }
    return DeltaEstimate(m=table.m, method="grid", delta=delta, certificate=cert)


def _chain_step1(a1: np.ndarray, sign: float, r: int) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (a1 / (1.0 - a1)) ** (2.0 / r)
        rad = 1.0 - t
        out = 0.5 * (1.0 + sign * (1.0 - a1) * np.sqrt(np.where(rad >= 0, rad, np.nan)))
    return out


def _chain_stepi(a_prev: np.ndarray, a_cur: np.ndarray, sign: float) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        q = (a_cur - a_prev / 2.0) / (1.0 - a_cur - a_prev / 2.0) * (1.0 - a_cur) / a_cur
        rad = 1.0 - q * q
        out = 0.5 + sign * (1.0 - a_cur) / 2.0 * np.sqrt(np.where(rad >= 0, rad, np.nan))
    return out


def critical_point_chain(
    alpha1: float, m: int, r: int = 2, branch_choices: Sequence[int] = ()
) -> tuple[float, ...]:
    """Forward iteration of the two critical-point closed forms.

    Returns (alpha_2, ..., alpha_{m+1}); entries are NaN from the first step
    whose radicand goes negative.  branch_choices supplies one sign (+1/-1)
    per step; missing entries default to -1 (the branch that can land below 1/2).
    """
    signs = list(branch_choices) + [-1] * (m - len(branch_choices))
    vals = [np.float64(alpha1)]
    vals.append(_chain_step1(vals[0], float(signs[0]), r))
    for i in range(1, m):
        vals.append(_chain_stepi(vals[i - 1], vals[i], float(signs[i])))
    return tuple(float(v) for v in vals[1:])


def chain_exponent(alphas: Sequence[float], r: int = 2) -> float:
    """h(alpha_1)/r + sum of f_A along the chain; NaN if any step leaves the domain."""
    if any(isnan(a) or not 0.0 <= a <= 1.0 for a in alphas):
        return nan
    tot = entropy(alphas[0]) / r
    for x, y in zip(alphas, alphas[1:]):
        tot += f_A(x, y)
    return tot


def _critical_values(m: int, delta: float, r: int, n_grid: int = 20000) -> list[dict]:
    """All critical chains of the m-round exponent ending at delta, with values."""
    a1 = np.concatenate([
        np.geomspace(1e-9, 0.1, n_grid // 4),
        np.linspace(0.1, 1.0 - 1e-9, n_grid),
    ])
    found: list[dict] = []
    for pattern in itertools.product((1.0, -1.0), repeat=m - 1):
        signs = list(pattern) + [-1.0]  # last step must land below 1/2
        vals = [a1]
        vals.append(_chain_step1(a1, signs[0], r))
        for i in range(1, m):
            vals.append(_chain_stepi(vals[i - 1], vals[i], signs[i]))
        end = vals[-1]
        gdiff = end - delta
        ok = np.isfinite(gdiff)
        flips = np.where(ok[:-1] & ok[1:] & (np.sign(gdiff[:-1]) * np.sign(gdiff[1:]) < 0))[0]
        for i in flips:
            lo, hi = float(a1[i]), float(a1[i + 1])
            glo = float(gdiff[i])
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                gm = critical_point_chain(mid, m, r, signs)[-1] - delta
                if isnan(gm):
                    break
                if glo * gm <= 0:
                    hi = mid
                else:
                    lo, glo = mid, gm
            a_star = 0.5 * (lo + hi)
            chain = (a_star,) + critical_point_chain(a_star, m, r, signs)
            val = chain_exponent(chain, r)
            if not isnan(val):
                found.append({"alpha1": a_star, "signs": signs, "chain": chain, "value": val})
    return found


def _max_critical_value(m: int, delta: float, r: int) -> tuple[float, Optional[dict]]:
    crits = _critical_values(m, delta, r)
    if not crits:
        return -inf, None
    best = max(crits, key=lambda c: c["value"])
    return best["value"], best


def delta_m_solver(m: int, r: int = 2, tol: float = 1e-9) -> DeltaEstimate:
    """Largest delta for which every critical point of the m-round exponent is <= 0.

    Scans delta upward to bracket the first inadmissible point (the
    admissibility predicate is not monotone far above the transition), then
    bisects to tol.  The certificate records the top critical chain just
    above the returned delta.
    """
    if not 2 <= m <= 6:
        raise ValueError("delta solver supports 2 <= m <= 6")
    step = 2e-3
    lo, hi = 0.0, None
    d = step
    while d < 0.5:
        mx, _ = _max_critical_value(m, d, r)
        if mx > 0.0:
            hi = d
            break
        lo = d
        d += step
    if hi is None:
        raise RuntimeError("delta_m_solver: no inadmissible delta found below 1/2")
    iters = 0
    while hi - lo > tol:
        iters += 1
        if iters > 80:
            raise RuntimeError(
                f"delta_m_solver failed to converge: bracket [{lo}, {hi}] after {iters} steps"
            )
        mid = 0.5 * (lo + hi)
        mx, _ = _max_critical_value(m, mid, r)
        if mx <= 0.0:
            lo = mid
        else:
            hi = mid
    delta = lo
    _, witness = _max_critical_value(m, hi, r)
    cert = {
        "bracket": [lo, hi],
        "tol": tol,
        "top_chain_above": None if witness is None else list(witness["chain"]),
        "top_value_above": None if witness is None else witness["value"],
        "sign_pattern": None if witness is None else witness["signs"],
    }
    return DeltaEstimate(m=m, method="critical_point", delta=delta, certificate=cert)
