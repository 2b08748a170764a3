"""Single-relationship contract design.

Two nested programs are solved here. The screening program
(solve_optimal) restricts attention to contracts whose participation
constraint binds for the lowest type, pays the advance unconditionally,
and maximizes expected virtual surplus net of the advance. The mixed
program (solve_mixed) prices an arbitrary advance/contingent pair at
actual payment flows, counts only types that accept and are worth
serving, and therefore nests the pure-advance and pure-contingent
benchmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .economy import (EconomyPrimitives, cost_prime_at, financing_cost,
                      marginal_ell, signal_prime_at, with_tightness)
from .errors import BracketError, DegeneracyError, DomainError
from .numerics import (Bracket, Tolerance, find_root, integrate,
                       maximize_scalar)

DEFAULT_TOL = Tolerance()
_TIE = 1e-12


@dataclass(frozen=True)
class Contract:
    """Advance a paid up front, completion payment b0 + b1 * signal."""

    advance: float
    intercept: float = 0.0
    slope: float = 0.0

    def __post_init__(self):
        if self.advance < -1e-12 or self.intercept < -1e-12 or self.slope < -1e-12:
            raise DomainError("contract terms must be nonnegative")


@dataclass(frozen=True)
class BilateralSolution:
    """Screening-program solution and its value decomposition."""

    contract: Contract
    cutoff: float
    value: float
    decomposition: dict
    foc_residual: float
    boundary_flag: str  # interior | corner_b1_zero | corner_a_zero


@dataclass(frozen=True)
class MixedSolution:
    """Mixed-program solution: value at actual flows over the served set."""

    contract: Contract
    implemented: tuple[float, float] | None  # served type interval, None if empty
    value: float
    branch: str  # rent profile: decreasing | flat | increasing | uninformative


# ---------------------------------------------------------------------------
# participation manifold


def binding_ir_advance(econ: EconomyPrimitives, b1: float) -> float:
    """Advance making the lowest type's participation bind, clamped to [0, K].

    Solves a + b1*mu(lo) = c(lo) + Phi(K - a); the left side net of the
    right is strictly increasing in a, so the root is unique.
    """
    lo = econ.dist.lower
    K = econ.working_capital
    mu_lo = float(econ.signal_mean(lo))
    c_lo = float(econ.cost(lo))

    def gap(a):
        return a + b1 * mu_lo - c_lo - financing_cost(econ.financing, K - a)

    if gap(0.0) >= 0.0:
        return 0.0
    if gap(K) <= 0.0:
        return K
    return find_root(gap, Bracket(0.0, K), DEFAULT_TOL)


def ir_slope(econ: EconomyPrimitives, b1: float) -> float:
    """d a / d b1 along the binding participation manifold.

    Equals -mu(lo) / (1 + Phi'(K - a)); at a clamp the value is the
    one-sided derivative of the unclamped manifold.
    """
    a = binding_ir_advance(econ, b1)
    mu_lo = float(econ.signal_mean(econ.dist.lower))
    phi_l = marginal_ell(econ.financing, econ.working_capital - a)
    return -mu_lo / (1.0 + phi_l)


def slope_cap(econ: EconomyPrimitives) -> float:
    """Upper end of the slope search range.

    Twice the slope at which the binding advance hits zero, capped at 10;
    the cap alone applies when the lowest type's signal is uninformative.
    """
    lo = econ.dist.lower
    mu_lo = float(econ.signal_mean(lo))
    if abs(mu_lo) < 1e-12:
        return 10.0
    b_zero = (float(econ.cost(lo))
              + financing_cost(econ.financing, econ.working_capital)) / mu_lo
    return min(2.0 * max(b_zero, 0.0), 10.0) if b_zero > 0 else 10.0


# ---------------------------------------------------------------------------
# virtual surplus and the screening program


def _wedge(econ, t):
    """(1 - F)/f elementwise."""
    t = np.asarray(t, dtype=float)
    return (1.0 - np.asarray(econ.dist.cdf(t), float)) / np.asarray(econ.dist.pdf(t), float)


def _mu_prime(econ, t):
    t = np.asarray(t, dtype=float)
    if econ.signal_mean_prime is not None:
        return np.asarray(econ.signal_mean_prime(t), float)
    return np.array([signal_prime_at(econ, float(x)) for x in np.ravel(t)]).reshape(t.shape)


def virtual_surplus(econ: EconomyPrimitives, theta, a: float, b1: float):
    """Pointwise virtual surplus of serving type theta under (a, b1).

    V - c - Phi(K - a) - b1 * mu' * (1 - F)/f; elementwise over theta.
    """
    t = np.asarray(theta, dtype=float)
    phi = financing_cost(econ.financing, econ.working_capital - a)
    out = (np.asarray(econ.surplus(t), float) - np.asarray(econ.cost(t), float)
           - phi - b1 * _mu_prime(econ, t) * _wedge(econ, t))
    return float(out) if np.isscalar(theta) else out


def cutoff(econ: EconomyPrimitives, a: float, b1: float) -> float:
    """Lowest served type: first sign change of the virtual surplus.

    Returns the support's lower end when virtual surplus is nonnegative
    everywhere and its upper end when it is negative everywhere (empty
    service set).
    """
    d = econ.dist
    ts = np.linspace(d.lower, d.upper, 257)
    vals = virtual_surplus(econ, ts, a, b1)
    if vals[0] >= 0.0:
        return d.lower
    idx = np.nonzero(vals >= 0.0)[0]
    if idx.size == 0:
        return d.upper
    i = int(idx[0])
    return find_root(lambda t: float(virtual_surplus(econ, t, a, b1)),
                     Bracket(float(ts[i - 1]), float(ts[i])), DEFAULT_TOL)


def rent_schedule(econ: EconomyPrimitives, b1: float, theta: float) -> float:
    """Information rent of type theta: integral of b1*mu' - c' from the bottom."""
    lo = econ.dist.lower
    if theta <= lo:
        return 0.0

    def integrand(t):
        return b1 * _mu_prime(econ, t) - np.array(
            [cost_prime_at(econ, float(x)) for x in np.atleast_1d(t)])

    return integrate(integrand, lo, theta, panels=256)


def principal_value(econ: EconomyPrimitives, b1: float,
                    panels: int = 512) -> tuple[float, dict]:
    """Screening-program value of slope b1 with the advance on the manifold.

    Returns (W, decomposition); W is assembled from the decomposition so
    the identity W = surplus - financing - rent - outlay holds exactly.
    An empty service set yields W = 0 with decomposition["empty_set"] = 1.
    """
    d = econ.dist
    a = binding_ir_advance(econ, b1)
    K = econ.working_capital
    phi = financing_cost(econ.financing, K - a)
    that = cutoff(econ, a, b1)
    empty = float(virtual_surplus(econ, d.upper, a, b1)) < 0.0
    if empty:
        decomp = {"productive_surplus": 0.0, "aggregate_financing_cost": 0.0,
                  "aggregate_information_rent": 0.0, "advance_outlay": 0.0,
                  "empty_set": 1.0}
        return 0.0, decomp
    tail = 1.0 - float(d.cdf(that))
    ps = integrate(lambda t: (np.asarray(econ.surplus(t), float)
                              - np.asarray(econ.cost(t), float))
                   * np.asarray(d.pdf(t), float), that, d.upper, panels)
    rent = b1 * integrate(lambda t: _mu_prime(econ, t)
                          * (1.0 - np.asarray(d.cdf(t), float)),
                          that, d.upper, panels)
    decomp = {"productive_surplus": ps,
              "aggregate_financing_cost": phi * tail,
              "aggregate_information_rent": rent,
              "advance_outlay": a,
              "empty_set": 0.0}
    w = ps - phi * tail - rent - a
    return w, decomp


def _rent_of_advance(econ, a_target, b1_hint, b1_hi):
    """Aggregate rent along the manifold, parameterized by the advance.

    Inverts the binding participation constraint in closed form:
    b1 = (c(lower) + Phi(K - a) - a) / mu(lower).
    """
    lo = econ.dist.lower
    mu_lo = float(econ.signal_mean(lo))
    if abs(mu_lo) < 1e-12:
        raise BracketError("flat signal floor; manifold has no slope inverse")
    b1 = (float(econ.cost(lo))
          + financing_cost(econ.financing, econ.working_capital - a_target)
          - a_target) / mu_lo
    if b1 < -1e-9 or b1 > b1_hi + 1e-9:
        raise BracketError("advance target unreachable on the slope range")
    _, decomp = principal_value(econ, min(max(b1, 0.0), b1_hi))
    return decomp["aggregate_information_rent"]


def sufficient_statistics(econ: EconomyPrimitives,
                          sol: BilateralSolution) -> dict:
    """Marginal statistics behind the advance optimality condition.

    At an interior optimum the marginal financing relief Phi'(K - a)
    equals the marginal screening cost (1 + dRent/da) / (1 - F(cutoff)).
    dRent/da is a central finite difference along the manifold; when the
    lowest type's signal is flat the manifold does not pin the slope and
    both the statistic and the residual are reported as nan.
    """
    a = sol.contract.advance
    b1 = sol.contract.slope
    K = econ.working_capital
    phi_l = marginal_ell(econ.financing, K - a)
    mu_lo = float(econ.signal_mean(econ.dist.lower))
    tail = 1.0 - float(econ.dist.cdf(sol.cutoff))
    corner = sol.boundary_flag != "interior"
    if abs(mu_lo) < 1e-12 or tail < 1e-12:
        return {"marginal_financing_relief": phi_l,
                "marginal_screening_cost": math.nan,
                "residual": math.nan, "corner": corner}
    h = 1e-5
    b1_hi = slope_cap(econ)
    ends = (binding_ir_advance(econ, 0.0), binding_ir_advance(econ, b1_hi))
    lo_r, hi_r = min(ends), max(ends)
    can_up = lo_r <= a + h <= hi_r + 1e-15
    can_dn = lo_r - 1e-15 <= a - h <= hi_r
    rent_here = sol.decomposition["aggregate_information_rent"]
    if can_up and can_dn:
        rent_up = _rent_of_advance(econ, a + h, b1, b1_hi)
        rent_dn = _rent_of_advance(econ, a - h, b1, b1_hi)
        drent = (rent_up - rent_dn) / (2.0 * h)
    elif can_dn:
        drent = (rent_here - _rent_of_advance(econ, a - h, b1, b1_hi)) / h
    elif can_up:
        drent = (_rent_of_advance(econ, a + h, b1, b1_hi) - rent_here) / h
    else:
        return {"marginal_financing_relief": phi_l,
                "marginal_screening_cost": math.nan,
                "residual": math.nan, "corner": corner}
    screening = (1.0 + drent) / tail
    return {"marginal_financing_relief": phi_l,
            "marginal_screening_cost": screening,
            "residual": phi_l - screening, "corner": corner}


def solve_optimal(econ: EconomyPrimitives,
                  tol: Tolerance = DEFAULT_TOL) -> BilateralSolution:
    """Solve the screening program over the slope, advance on the manifold."""
    b1_hi = slope_cap(econ)
    b1_star, _ = maximize_scalar(lambda b: principal_value(econ, b)[0],
                                 0.0, b1_hi, tol)
    a_star = binding_ir_advance(econ, b1_star)
    w, decomp = principal_value(econ, b1_star)
    that = cutoff(econ, a_star, b1_star)
    if b1_star <= 1e-9:
        flag = "corner_b1_zero"
    elif a_star <= 1e-9:
        flag = "corner_a_zero"
    else:
        flag = "interior"
    sol = BilateralSolution(contract=Contract(a_star, 0.0, b1_star),
                            cutoff=that, value=w, decomposition=decomp,
                            foc_residual=math.nan, boundary_flag=flag)
    stats = sufficient_statistics(econ, sol)
    return BilateralSolution(contract=sol.contract, cutoff=that, value=w,
                             decomposition=decomp,
                             foc_residual=stats["residual"],
                             boundary_flag=flag)


# ---------------------------------------------------------------------------
# mixed program at actual flows


def _monotone_region(f_lo, f_hi, root_fn, lo, hi):
    """Sub-interval of [lo, hi] where a monotone function is nonnegative."""
    if f_lo >= 0.0 and f_hi >= 0.0:
        return lo, hi
    if f_lo < 0.0 and f_hi < 0.0:
        return None
    r = root_fn()
    return (r, hi) if f_lo < 0.0 else (lo, r)


def served_interval(econ: EconomyPrimitives, a: float, b0: float,
                    b1: float) -> tuple[float, float] | None:
    """Types that accept (U >= 0) and are worth serving (pi >= 0).

    U = a + b0 + b1*mu - c - Phi(K - a) and pi = V - a - b0 - b1*mu are
    assumed monotone in theta (true for the affine benchmark family);
    the served set is then an interval, possibly empty (None).
    """
    d = econ.dist
    K = econ.working_capital
    phi = financing_cost(econ.financing, K - a)

    def u(t):
        return a + b0 + b1 * float(econ.signal_mean(t)) - float(econ.cost(t)) - phi

    def profit(t):
        return float(econ.surplus(t)) - a - b0 - b1 * float(econ.signal_mean(t))

    span_u = _monotone_region(
        u(d.lower), u(d.upper),
        lambda: find_root(u, Bracket(d.lower, d.upper), DEFAULT_TOL),
        d.lower, d.upper)
    if span_u is None:
        return None
    span_p = _monotone_region(
        profit(d.lower), profit(d.upper),
        lambda: find_root(profit, Bracket(d.lower, d.upper), DEFAULT_TOL),
        d.lower, d.upper)
    if span_p is None:
        return None
    lo = max(span_u[0], span_p[0])
    hi = min(span_u[1], span_p[1])
    return (lo, hi) if lo < hi else None


def contract_value(econ: EconomyPrimitives, a: float, b0: float = 0.0,
                   b1: float = 0.0, panels: int = 128) -> float:
    """Expected profit of an arbitrary contract at actual payment flows.

    Integrates V - a - b0 - b1*mu over the served interval; nothing is
    paid to types that walk away.
    """
    span = served_interval(econ, a, b0, b1)
    if span is None:
        return 0.0

    def integrand(t):
        t = np.asarray(t, dtype=float)
        return (np.asarray(econ.surplus(t), float) - a - b0
                - b1 * np.asarray(econ.signal_mean(t), float)) \
            * np.asarray(econ.dist.pdf(t), float)

    return integrate(integrand, span[0], span[1], panels)


def _ir_root_at(econ, b1, theta):
    """Advance making type theta's participation bind, clamped to [0, K]."""
    K = econ.working_capital
    mu_t = float(econ.signal_mean(theta))
    c_t = float(econ.cost(theta))

    def gap(a):
        return a + b1 * mu_t - c_t - financing_cost(econ.financing, K - a)

    if gap(0.0) >= 0.0:
        return 0.0
    if gap(K) <= 0.0:
        return K
    return find_root(gap, Bracket(0.0, K), DEFAULT_TOL)


def _best_advance(econ, b1, points=17, panels=128):
    """Best advance for a fixed slope in the mixed program."""
    K = econ.working_capital
    d = econ.dist
    cands = {0.0, K,
             _ir_root_at(econ, b1, d.lower),
             _ir_root_at(econ, b1, d.upper)}

    def val(a):
        return contract_value(econ, a, 0.0, b1, panels)

    xs = np.linspace(0.0, K, points)
    vals = [val(float(x)) for x in xs]
    i = int(np.argmax(vals))
    lo = float(xs[max(i - 1, 0)])
    hi = float(xs[min(i + 1, points - 1)])
    x_g, f_g = maximize_scalar(val, lo, hi, Tolerance(abs_x=1e-11), scan_points=9)
    best_a, best_v = x_g, f_g
    for c in sorted(cands):
        fc = val(c)
        if fc > best_v + _TIE * max(1.0, abs(best_v)):
            best_a, best_v = c, fc
        elif abs(fc - best_v) <= _TIE * max(1.0, abs(best_v)) and c < best_a:
            best_a, best_v = c, fc
    return best_a, best_v


def solve_mixed(econ: EconomyPrimitives, outer_points: int = 33,
                inner_points: int = 17, panels: int = 128) -> MixedSolution:
    """Solve the mixed program over (advance, slope) at actual flows.

    The slope search runs on [0, c'/mu'] (rents weakly increase in the
    slope beyond the flat-rent point) with the exact flat-rent slope and
    the screening-program slope injected as candidates. An uninformative
    signal reduces the program to the pure-advance choice.
    """
    d = econ.dist
    mid = 0.5 * (d.lower + d.upper)
    mu_p = signal_prime_at(econ, mid)
    c_p = cost_prime_at(econ, mid)
    if abs(mu_p) < 1e-12:
        a_star, v_star = _best_advance(econ, 0.0, inner_points, panels)
        return MixedSolution(Contract(a_star, 0.0, 0.0),
                             served_interval(econ, a_star, 0.0, 0.0),
                             v_star, "uninformative")
    b1_flat = c_p / mu_p

    def outer(b1):
        return _best_advance(econ, b1, inner_points, panels)[1]

    b1_g, v_g = maximize_scalar(outer, 0.0, b1_flat,
                                Tolerance(abs_x=1e-9), scan_points=outer_points)
    cands = [(b1_g, v_g)]
    for c in (0.0, b1_flat, solve_optimal(econ).contract.slope):
        if 0.0 <= c <= b1_flat:
            cands.append((c, outer(c)))
    b1_star, v_star = cands[0]
    for c, fc in cands[1:]:
        if fc > v_star + _TIE * max(1.0, abs(v_star)):
            b1_star, v_star = c, fc
        elif abs(fc - v_star) <= _TIE * max(1.0, abs(v_star)) and c < b1_star:
            b1_star, v_star = c, fc
    a_star, v_star = _best_advance(econ, b1_star, inner_points, panels)
    span = served_interval(econ, a_star, 0.0, b1_star)
    if abs(b1_star - b1_flat) <= 1e-9:
        branch = "flat"
    elif b1_star * mu_p < c_p:
        branch = "decreasing"
    else:
        branch = "increasing"
    return MixedSolution(Contract(a_star, 0.0, b1_star), span, v_star, branch)


# ---------------------------------------------------------------------------
# pure benchmarks, dominance, and the tightness sweep


def closed_form_ell_star(R: float) -> float:
    """Optimal uncovered gap for quadratic financing on the benchmark.

    Root of R*ell^2/2 + ell = 1, i.e. (-1 + sqrt(1 + 2R)) / R, with the
    R -> 0 limit equal to 1.
    """
    if R < 0:
        raise DomainError("tightness must be nonnegative")
    if R < 1e-12:
        return 1.0
    return (-1.0 + math.sqrt(1.0 + 2.0 * R)) / R


def pure_advance_value(econ: EconomyPrimitives) -> float:
    """Value of the best pure-advance contract (a = K, no contingent pay)."""
    return contract_value(econ, econ.working_capital, 0.0, 0.0, panels=512)


def contingent_value(econ: EconomyPrimitives, b1: float,
                     panels: int = 512) -> float:
    """Screening value of a zero-advance contract with slope b1."""
    d = econ.dist
    that = cutoff(econ, 0.0, b1)
    if float(virtual_surplus(econ, d.upper, 0.0, b1)) < 0.0:
        return 0.0
    return integrate(lambda t: virtual_surplus(econ, t, 0.0, b1)
                     * np.asarray(d.pdf(t), float), that, d.upper, panels)


def pure_contingent_value(econ: EconomyPrimitives) -> float:
    """Value of the best zero-advance contract."""
    _, v = maximize_scalar(lambda b: contingent_value(econ, b),
                           0.0, slope_cap(econ), DEFAULT_TOL)
    return v


def crossing_threshold(econ: EconomyPrimitives) -> float:
    """Tightness at which the pure-contingent value falls to the pure-advance one.

    The pure-advance value does not depend on tightness (no uncovered
    gap); the pure-contingent value strictly decreases in it.
    """
    w_a = pure_advance_value(econ)

    def gap(R):
        return pure_contingent_value(with_tightness(econ, R)) - w_a

    lo, hi = 0.0, 1.0
    g_lo = gap(lo)
    if g_lo <= 0.0:
        raise BracketError("pure contingent already dominated at R = 0")
    while gap(hi) > 0.0:
        hi *= 2.0
        if hi > 64.0:
            raise BracketError("no crossing found for tightness up to 64")
    return find_root(gap, Bracket(lo, hi), DEFAULT_TOL)


def sweep_R(econ: EconomyPrimitives, R_grid) -> tuple[list[dict], dict]:
    """Comparative statics of the benchmark contracts over tightness.

    Returns one row per tightness value with the screening-program
    advance, the mixed-program value and advance share, and the pure
    benchmarks, plus divided-difference diagnostics for the advance path.
    """
    rows = []
    d = econ.dist
    scale = float(econ.surplus(d.upper)) - float(econ.cost(d.upper))
    for R in R_grid:
        e = with_tightness(econ, float(R))
        sol = solve_optimal(e)
        mix = solve_mixed(e)
        a = sol.contract.advance
        K = e.working_capital
        if mix.implemented is not None and mix.contract.slope > 0:
            lo_s, hi_s = mix.implemented
            mass = float(d.cdf(hi_s)) - float(d.cdf(lo_s))
            mean_mu = integrate(
                lambda t: np.asarray(e.signal_mean(t), float)
                * np.asarray(d.pdf(t), float), lo_s, hi_s, 256) / max(mass, 1e-12)
            expected_pay = mix.contract.advance + mix.contract.slope * mean_mu
            beta = mix.contract.advance / expected_pay if expected_pay > 0 else 1.0
        else:
            beta = 1.0
        rows.append({
            "R": float(R),
            "a_star": a,
            "ell_star": K - a,
            "beta_star": beta,
            "phi_share": financing_cost(e.financing, K - a) / scale,
            "W_M": mix.value,
            "W_A": pure_advance_value(e),
            "W_C": pure_contingent_value(e),
        })
    a_path = np.array([r["a_star"] for r in rows])
    Rs = np.array([r["R"] for r in rows])
    slopes = np.diff(a_path) / np.diff(Rs)
    diagnostics = {
        "advance_increasing": bool(np.all(slopes > 0)),
        "advance_concave": bool(np.all(np.diff(slopes) < 0)),
    }
    return rows, diagnostics
