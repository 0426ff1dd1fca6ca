"""Both sides of the shifted-second-moment identity by panel quadrature.

LHS integrand: zeta(1/2+a+it) zeta(1/2-b-it).
RHS integrand: zeta(1+c) + zeta(1-c) chi(1/2+a+it) chi(1/2-b-it), with the
c -> 0 pointwise limit 2 gamma - L'(t) (L' the log-derivative of chi)
below |c| = 1e-4, carried to first order in c.

Integration is panel-based Gauss-Legendre: every base panel is evaluated
once whole and once split in half; the difference is the Richardson-style
error estimate, and panels failing their share of the tolerance budget
are bisected up to 6 levels.  Panel values combine through compensated
summation in panel order, so results are independent of worker count.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .chiprod import chi_product_exact
from .complexfn import (
    _CHI_DD_HEIGHT,
    _log_chi_big_im,
    BERNOULLI,
    DEFAULT_POLICY,
    EULER_GAMMA,
    EvalPolicy,
    LN2PI,
    RS_AUTO_HEIGHT,
    RS_HEIGHT_CEILING,
    SMALL_C_THRESHOLD,
    log_chi,
    zeta_em,
    zeta_strip_batch,
)
from .errors import BudgetExceeded, DomainError
from .shifts import ShiftPair
from .summation import fsum_complex

__all__ = [
    "QuadratureConfig",
    "QuadDiagnostics",
    "MomentReport",
    "Side",
    "integrand_lhs",
    "integrand_rhs",
    "integrand_rhs_direct",
    "integrate",
    "theorem_report",
    "classical_main_term",
    "DEFAULT_QUADRATURE",
    "DEFAULT_HYPOTHESIS_CONSTANT",
]

#: Maximum bisection depth per base panel.
MAX_REFINE_DEPTH = 6
#: Default H in the Re-shift hypothesis |Re a|, |Re b| <= H / log T.
DEFAULT_HYPOTHESIS_CONSTANT = 2.0

LHS = "lhs"
RHS = "rhs"
Side = str


@dataclass(frozen=True)
class QuadratureConfig:
    """Panel width 0.25 with 8 Gauss-Legendre nodes resolves the
    integrand's log-height oscillation rate with >= 15 nodes per
    oscillation up to height ~1e6; adaptive bisection guards the rest."""

    panel_width: float = 0.25
    nodes_per_panel: int = 8
    refinement_tolerance: float = 1e-6
    max_panels: int = 2_000_000

    def __post_init__(self) -> None:
        if not self.panel_width > 0:
            raise DomainError("panel_width must be positive")
        if self.nodes_per_panel < 4:
            raise DomainError("nodes_per_panel must be at least 4")
        if not self.refinement_tolerance > 0:
            raise DomainError("refinement_tolerance must be positive")
        if self.max_panels < 1:
            raise DomainError("max_panels must be positive")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class QuadDiagnostics:
    base_panels: int
    evaluated_panels: int
    refined_panels: int
    error_estimate: float


@dataclass(frozen=True)
class MomentReport:
    T: float
    shifts: ShiftPair
    lhs: complex
    rhs: complex
    residual: complex
    normalizer: float
    normalized_residual: float
    u: float
    v: float
    hypothesis_ok: bool
    quad_lhs: QuadDiagnostics
    quad_rhs: QuadDiagnostics


# ----------------------------------------------------------------------
# vectorized special-function helpers for the integrands
# ----------------------------------------------------------------------

_ASYMP_RADIUS = 24.0


def _digamma_vec(z: np.ndarray) -> np.ndarray:
    # asymptotic series where |z| is large, scalar push-up elsewhere
    out = np.empty_like(z)
    big = np.abs(z) >= _ASYMP_RADIUS
    if np.any(big):
        w = z[big]
        acc = np.log(w) - 0.5 / w
        p = 1.0 / (w * w)
        zinv2 = p.copy()
        for k in range(1, 13):
            acc -= (BERNOULLI[2 * k] / (2 * k)) * p
            p = p * zinv2
        out[big] = acc
    if np.any(~big):
        from .complexfn import digamma

        out[~big] = [digamma(complex(v)) for v in z[~big]]
    return out


def _trigamma_vec(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    big = np.abs(z) >= _ASYMP_RADIUS
    if np.any(big):
        w = z[big]
        winv = 1.0 / w
        winv2 = winv * winv
        acc = winv + 0.5 * winv2
        p = winv * winv2
        for k in range(1, 13):
            acc += BERNOULLI[2 * k] * p
            p = p * winv2
        out[big] = acc
    if np.any(~big):
        from .complexfn import trigamma

        out[~big] = [trigamma(complex(v)) for v in z[~big]]
    return out


def _cot_vec(w: np.ndarray) -> np.ndarray:
    # cot(w), overflow-safe for large |Im w|
    out = np.empty_like(w)
    up = w.imag > 20.0
    dn = w.imag < -20.0
    mid = ~(up | dn)
    if np.any(up):
        q = np.exp(2j * w[up])
        out[up] = -1j * (1.0 + q) / (1.0 - q)
    if np.any(dn):
        q = np.exp(-2j * w[dn])
        out[dn] = 1j * (1.0 + q) / (1.0 - q)
    if np.any(mid):
        out[mid] = np.cos(w[mid]) / np.sin(w[mid])
    return out


def _csc2_vec(w: np.ndarray) -> np.ndarray:
    # 1 / sin(w)^2 = 4 e^{2iw} / (1 - e^{2iw})^2 for Im w > 0
    out = np.empty_like(w)
    up = w.imag > 20.0
    dn = w.imag < -20.0
    mid = ~(up | dn)
    if np.any(up):
        q = np.exp(2j * w[up])
        out[up] = 4.0 * q / (1.0 - q) ** 2
    if np.any(dn):
        q = np.exp(-2j * w[dn])
        out[dn] = 4.0 * q / (1.0 - q) ** 2
    if np.any(mid):
        out[mid] = 1.0 / np.sin(w[mid]) ** 2
    return out


def _zeta_many(s: np.ndarray, policy: EvalPolicy) -> np.ndarray:
    """zeta over an array of points: Riemann-Siegel batches inside the
    strip above the auto height, Euler-Maclaurin pointwise elsewhere."""
    s = np.asarray(s, dtype=np.complex128)
    out = np.empty_like(s)
    h = np.abs(s.imag)
    rs_ok = (
        (s.real > 0.0)
        & (s.real < 1.0)
        & (h >= RS_AUTO_HEIGHT)
        & (h <= RS_HEIGHT_CEILING)
    )
    if np.any(rs_ok):
        out[rs_ok] = zeta_strip_batch(s[rs_ok])
    if np.any(~rs_ok):
        out[~rs_ok] = [zeta_em(complex(v), policy) for v in s[~rs_ok]]
    return out


# ----------------------------------------------------------------------
# integrands
# ----------------------------------------------------------------------


@functools.lru_cache(maxsize=128)
def _edge_zetas(c: complex, policy: EvalPolicy) -> tuple[complex, complex]:
    # zeta(1+c), zeta(1-c): evaluated once per shift pair, reused across
    # every quadrature node.  For small |c| the rounding of 1 +/- c moves
    # the argument by ~eps off 1+c while the pole term is 1/c, so the
    # value is corrected through the exactly-representable offset:
    # zeta(1+c) = [zeta(1+c~) - 1/c~] + 1/c + O(gamma_1 (c - c~)).
    s_plus = complex(1.0 + c.real, c.imag)
    c_eff_p = complex(s_plus.real - 1.0, s_plus.imag)
    z_plus = zeta_em(s_plus, policy)
    if c != c_eff_p and c_eff_p != 0:
        z_plus = z_plus - 1.0 / c_eff_p + 1.0 / c
    s_minus = complex(1.0 - c.real, -c.imag)
    c_eff_m = complex(1.0 - s_minus.real, -s_minus.imag)
    z_minus = zeta_em(s_minus, policy)
    if c != c_eff_m and c_eff_m != 0:
        z_minus = z_minus + 1.0 / c_eff_m - 1.0 / c
    return z_plus, z_minus


class LhsIntegrand:
    """zeta(1/2+a+it) zeta(1/2-b-it) over arrays of t."""

    def __init__(self, shifts: ShiftPair, policy: EvalPolicy = DEFAULT_POLICY):
        self.shifts = shifts
        self.policy = policy

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        sp = self.shifts
        s1 = (0.5 + sp.alpha) + 1j * (t + sp.alpha_p)
        s2 = (0.5 - sp.beta) - 1j * (t + sp.beta_p)
        return _zeta_many(s1, self.policy) * _zeta_many(s2, self.policy)


def _chi_product_vec(shifts: ShiftPair, t: np.ndarray) -> np.ndarray:
    # vectorized chi_product_exact: analytic log difference where the
    # asymptotic pieces are safe, scalar fallback elsewhere
    sp = shifts
    c = sp.c
    out = np.empty(len(t), dtype=np.complex128)
    if c == 0:
        out[:] = 1.0
        return out
    h1 = t + sp.alpha_p
    h2 = t + sp.beta_p
    z1 = (0.5 - sp.alpha) - 1j * h1
    z2 = (0.5 - sp.beta) - 1j * h2
    same_up = (h1 > 0) & (h2 > 0)
    same_dn = (h1 < 0) & (h2 < 0)
    safe = (
        (np.minimum(np.abs(h1), np.abs(h2)) >= 16.0)
        & (abs(c) <= 0.5 * np.minimum(np.abs(z1), np.abs(z2)))
        & (same_up | same_dn)
    )
    if np.any(safe):
        zz1 = z1[safe]
        zz2 = z2[safe]
        s1 = 1.0 - zz1
        s2 = 1.0 - zz2
        sign = np.where(h1[safe] > 0, -0.5j * math.pi, 0.5j * math.pi)
        pm = np.where(h1[safe] > 0, 1j * math.pi, -1j * math.pi)
        parts = c * LN2PI + sign * c
        parts = parts + np.log1p(-np.exp(pm * s1)) - np.log1p(-np.exp(pm * s2))
        parts = parts + (0.5 - zz1) * np.log1p(c / zz1) - c * np.log(zz2) + c
        parts = parts + _stirling_tail_vec(zz1) - _stirling_tail_vec(zz2)
        out[safe] = np.exp(parts)
    if np.any(~safe):
        out[~safe] = [chi_product_exact(sp, float(v)) for v in t[~safe]]
    return out


def _stirling_tail_vec(z: np.ndarray) -> np.ndarray:
    zinv2 = 1.0 / (z * z)
    p = 1.0 / z
    acc = np.zeros_like(z)
    for k in range(1, 13):
        coeff = BERNOULLI[2 * k] / ((2 * k) * (2 * k - 1))
        acc = acc + coeff * p
        p = p * zinv2
    return acc


class RhsIntegrand:
    """zeta(1+c) + zeta(1-c) chi(1/2+a+it) chi(1/2-b-it) over arrays of t.

    Below |c| = 1e-4 the two zeta poles cancel past binary64 resolution
    and the integrand switches to the analytic limit
      2 gamma - L(t) + c (gamma L(t) - L(t)^2/2 + L2(t)/2),
    where L = (log chi)'(1/2+a+it) = log 2 pi + (pi/2) cot(pi s/2)
    - digamma(1-s) and L2 = (log chi)''.  The first-order term keeps the
    branch within O(c^2 log^3) of the direct form, validated pointwise by
    the small-c probe in the tests.
    """

    def __init__(
        self,
        shifts: ShiftPair,
        policy: EvalPolicy = DEFAULT_POLICY,
        branch: str = "auto",
    ):
        if branch not in ("auto", "direct", "limit"):
            raise DomainError(f"unknown RHS branch {branch!r}")
        self.shifts = shifts
        self.policy = policy
        if branch == "auto":
            self.limit_branch = abs(shifts.c) < SMALL_C_THRESHOLD
        else:
            self.limit_branch = branch == "limit"
        if not self.limit_branch:
            self.zeta_plus, self.zeta_minus = _edge_zetas(shifts.c, policy)

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        sp = self.shifts
        if not self.limit_branch:
            return self.zeta_plus + self.zeta_minus * _chi_product_vec(sp, t)
        s1 = (0.5 + sp.alpha) + 1j * (t + sp.alpha_p)
        lam = (
            LN2PI
            + 0.5 * math.pi * _cot_vec(0.5 * math.pi * s1)
            - _digamma_vec(1.0 - s1)
        )
        lam2 = -0.25 * math.pi**2 * _csc2_vec(0.5 * math.pi * s1) + _trigamma_vec(
            1.0 - s1
        )
        c = sp.c
        return (
            2.0 * EULER_GAMMA
            - lam
            + c * (EULER_GAMMA * lam - 0.5 * lam * lam + 0.5 * lam2)
        )


def integrand_lhs(
    shifts: ShiftPair, t: float, policy: EvalPolicy = DEFAULT_POLICY
) -> complex:
    """Pointwise LHS integrand (array evaluation via LhsIntegrand)."""
    return complex(LhsIntegrand(shifts, policy)(np.array([t]))[0])


def integrand_rhs(
    shifts: ShiftPair, t: float, policy: EvalPolicy = DEFAULT_POLICY
) -> complex:
    """Pointwise RHS integrand with the automatic c -> 0 limit branch."""
    return complex(RhsIntegrand(shifts, policy)(np.array([t]))[0])


def integrand_rhs_direct(
    shifts: ShiftPair, t: float, policy: EvalPolicy = DEFAULT_POLICY
) -> complex:
    """RHS integrand forced through the displayed (non-limit) form;
    one side of the small-c validation probe."""
    return complex(RhsIntegrand(shifts, policy, branch="direct")(np.array([t]))[0])


def integrand_rhs_limit(
    shifts: ShiftPair, t: float, policy: EvalPolicy = DEFAULT_POLICY
) -> complex:
    """RHS integrand forced through the c -> 0 limit branch; the other
    side of the small-c validation probe."""
    return complex(RhsIntegrand(shifts, policy, branch="limit")(np.array([t]))[0])


# ----------------------------------------------------------------------
# quadrature
# ----------------------------------------------------------------------


@functools.lru_cache(maxsize=8)
def _gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_values(f, lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
    # Gauss-Legendre over a batch of panels [lo_i, hi_i]; one call to f
    x, w = _gl_nodes(n)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = f(nodes).reshape(len(lo), n)
    return (vals * w[None, :]).sum(axis=1) * half


class _PanelBudget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int, where: float) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(
                f"quadrature exceeded max_panels={self.limit} near t={where:.6g}"
            )


def _refine(
    f,
    lo: float,
    hi: float,
    coarse: complex,
    tol: float,
    n: int,
    depth: int,
    budget: _PanelBudget,
) -> tuple[list[complex], float, int]:
    # bisect until |fine - coarse| <= tol; returns sub-panel values in
    # left-to-right order, the error estimate, and the split count
    budget.spend(2, lo)
    mid = 0.5 * (lo + hi)
    pair = _panel_values(f, np.array([lo, mid]), np.array([mid, hi]), n)
    fine = complex(pair[0] + pair[1])
    est = abs(fine - coarse)
    if est <= tol:
        return [complex(pair[0]), complex(pair[1])], est, 1
    if depth >= MAX_REFINE_DEPTH:
        raise BudgetExceeded(
            f"quadrature refinement stalled on panel [{lo:.6g}, {hi:.6g}] "
            f"(estimate {est:.3e} > tolerance {tol:.3e})"
        )
    left_vals, left_est, nl = _refine(
        f, lo, mid, complex(pair[0]), 0.5 * tol, n, depth + 1, budget
    )
    right_vals, right_est, nr = _refine(
        f, mid, hi, complex(pair[1]), 0.5 * tol, n, depth + 1, budget
    )
    return left_vals + right_vals, left_est + right_est, nl + nr


def _integrate_block(
    f, edges: np.ndarray, scale: float, total_width: float, quad: QuadratureConfig
) -> tuple[list[complex], float, int, int]:
    # one contiguous block of base panels: coarse pass, halved pass,
    # recursive refinement of the failures
    n = quad.nodes_per_panel
    lo = edges[:-1]
    hi = edges[1:]
    budget = _PanelBudget(quad.max_panels)
    budget.spend(len(lo), float(lo[0]))
    coarse = _panel_values(f, lo, hi, n)
    mids = 0.5 * (lo + hi)
    budget.spend(2 * len(lo), float(lo[0]))
    halves = _panel_values(
        f,
        np.concatenate([lo, mids]),
        np.concatenate([mids, hi]),
        n,
    )
    fine = halves[: len(lo)] + halves[len(lo) :]
    ests = np.abs(fine - coarse)
    tols = quad.refinement_tolerance * scale * (hi - lo) / total_width
    values: list[complex] = []
    est_total = 0.0
    refined = 0
    for i in range(len(lo)):
        if ests[i] <= tols[i]:
            values.append(complex(fine[i]))
            est_total += float(ests[i])
        else:
            refined += 1
            sub_l, est_l, _ = _refine(
                f,
                float(lo[i]),
                float(mids[i]),
                complex(halves[i]),
                0.5 * float(tols[i]),
                n,
                1,
                budget,
            )
            sub_r, est_r, _ = _refine(
                f,
                float(mids[i]),
                float(hi[i]),
                complex(halves[i + len(lo)]),
                0.5 * float(tols[i]),
                n,
                1,
                budget,
            )
            values.extend(sub_l + sub_r)
            est_total += est_l + est_r
    return values, est_total, budget.used, refined


def _make_integrand(side: Side, shifts: ShiftPair, policy: EvalPolicy):
    if side == LHS:
        return LhsIntegrand(shifts, policy)
    if side == RHS:
        return RhsIntegrand(shifts, policy)
    raise DomainError(f"unknown side {side!r}")


def integrate(
    side: Side,
    shifts: ShiftPair,
    T: float,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
    policy: EvalPolicy = DEFAULT_POLICY,
    t_lower: float = 0.0,
) -> tuple[complex, QuadDiagnostics]:
    """Integral of one Theorem-1 side over [t_lower, T].

    Total estimated quadrature error is held below
    refinement_tolerance * (1 + |result|), apportioned to panels by
    width; a panel that cannot meet its share within 6 bisections raises
    BudgetExceeded with its location.
    """
    if T < t_lower:
        raise DomainError(f"integrate needs T >= {t_lower}, got {T}")
    if T == t_lower:
        return 0.0 + 0.0j, QuadDiagnostics(0, 0, 0, 0.0)
    f = _make_integrand(side, shifts, policy)
    span = T - t_lower
    n_base = max(1, math.ceil(span / quad.panel_width))
    edges = t_lower + span * np.arange(n_base + 1) / n_base
    # coarse total fixes the tolerance scale 1 + |I|
    coarse_total = fsum_complex(_panel_values(f, edges[:-1], edges[1:], quad.nodes_per_panel))
    scale = 1.0 + abs(coarse_total)
    block = 256
    values: list[complex] = []
    est = 0.0
    used = n_base
    refined = 0
    for start in range(0, n_base, block):
        stop = min(n_base, start + block)
        v, e, u, r = _integrate_block(f, edges[start : stop + 1], scale, span, quad)
        values.extend(v)
        est += e
        used += u
        refined += r
    total = fsum_complex(np.array(values, dtype=np.complex128))
    return total, QuadDiagnostics(n_base, used, refined, est)


def classical_main_term(T: float) -> float:
    """T log(T / 2 pi) + (2 gamma - 1) T, the unshifted second-moment
    main term used as a sanity probe."""
    return T * math.log(T / (2.0 * math.pi)) + (2.0 * EULER_GAMMA - 1.0) * T


def theorem_report(
    shifts: ShiftPair,
    T: float,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
    policy: EvalPolicy = DEFAULT_POLICY,
    hypothesis_constant: float = DEFAULT_HYPOTHESIS_CONSTANT,
) -> MomentReport:
    """Both integrals, the residual, and the theorem's error envelope.

    normalizer = (sqrt T + sqrt|alpha'| + sqrt|beta'|) log^2 T;
    T^u = max(|alpha'|, T) and T^v = max(|beta'|, T) record how far the
    shifts exceed the integration height.  Re-shift hypothesis violations
    are recorded, not fatal.
    """
    if T < 2.0:
        raise DomainError(f"theorem_report needs T >= 2, got {T}")
    lhs, quad_lhs = integrate(LHS, shifts, T, quad, policy)
    rhs, quad_rhs = integrate(RHS, shifts, T, quad, policy)
    residual = lhs - rhs
    log_t = math.log(T)
    normalizer = (
        math.sqrt(T) + math.sqrt(abs(shifts.alpha_p)) + math.sqrt(abs(shifts.beta_p))
    ) * log_t**2
    u = math.log(max(abs(shifts.alpha_p), T)) / log_t
    v = math.log(max(abs(shifts.beta_p), T)) / log_t
    hyp = (
        abs(shifts.alpha) <= hypothesis_constant / log_t
        and abs(shifts.beta) <= hypothesis_constant / log_t
    )
    return MomentReport(
        T=T,
        shifts=shifts,
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        normalizer=normalizer,
        normalized_residual=abs(residual) / normalizer,
        u=u,
        v=v,
        hypothesis_ok=hyp,
        quad_lhs=quad_lhs,
        quad_rhs=quad_rhs,
    )
