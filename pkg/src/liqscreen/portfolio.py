"""Multi-relationship portfolios with implementation complementarities.

A portfolio couples several screening relationships through a symmetric
complementarity matrix: the principal collects an extra payoff on each
pair of jointly implemented relationships, which links the per-
relationship cutoffs into a fixed-point system and creates a contagion
channel from one counterparty's credit conditions to the whole book.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bilateral import (Contract, binding_ir_advance, cutoff, solve_mixed,
                        virtual_surplus)
from .economy import (EconomyPrimitives, marginal_ell, marginal_r,
                      signal_prime_at, with_tightness)
from .errors import DegeneracyError, DomainError
from .numerics import Bracket, Tolerance, find_root, fixed_point, integrate, kernels

FP_TOL = Tolerance(abs_x=1e-10, abs_f=1e-12, max_iter=20000)


# ---------------------------------------------------------------------------
# calibration of the default portfolio contract


def slope_calibration(R: float) -> float:
    """Default contingent slope schedule for portfolio comparative statics.

    Smoothly decreasing in tightness: 0.35*exp(-2(R-1)) up to R = 1.5,
    continued hyperbolically beyond so the slope stays positive.
    """
    if R < 0:
        raise DomainError("tightness must be nonnegative")
    if R <= 1.5:
        return 0.35 * math.exp(-2.0 * (R - 1.0))
    return 0.35 * math.exp(-1.0) * (1.5 / R)


def slope_calibration_prime(R: float) -> float:
    """Derivative of the calibration schedule."""
    if R <= 1.5:
        return -0.7 * math.exp(-2.0 * (R - 1.0))
    return -0.35 * math.exp(-1.0) * 1.5 / (R * R)


def calibrated_contract(econ: EconomyPrimitives) -> Contract:
    """Calibrated slope at the economy's tightness, advance on the manifold."""
    b1 = slope_calibration(econ.financing.tightness)
    return Contract(binding_ir_advance(econ, b1), 0.0, b1)


def advance_response(econ: EconomyPrimitives, b1: float,
                     b1_prime: float) -> float:
    """d a / d R along the binding-participation manifold.

    Differentiates a + b1*mu(lo) = c(lo) + Phi(K - a; R) in R, letting
    the slope follow its schedule: a' = (Phi_R - b1'*mu(lo)) / (1 + Phi_ell).
    """
    a = binding_ir_advance(econ, b1)
    ell = econ.working_capital - a
    mu_lo = float(econ.signal_mean(econ.dist.lower))
    return (marginal_r(econ.financing, ell) - b1_prime * mu_lo) \
        / (1.0 + marginal_ell(econ.financing, ell))


# ---------------------------------------------------------------------------
# portfolio container


@dataclass(frozen=True, eq=False)
class PortfolioEconomy:
    """Relationships, their contracts, and the complementarity matrix."""

    economies: tuple[EconomyPrimitives, ...]
    coupling: np.ndarray
    contracts: tuple[Contract, ...]

    def __post_init__(self):
        n = len(self.economies)
        c = np.asarray(self.coupling, float)
        if c.shape != (n, n):
            raise DomainError("coupling matrix shape must match economy count")
        if np.any(np.abs(c - c.T) > 1e-12):
            raise DomainError("coupling matrix must be symmetric")
        if np.any(np.abs(np.diag(c)) > 1e-12):
            raise DomainError("coupling matrix needs a zero diagonal")
        if np.any(c < -1e-12):
            raise DomainError("complementarities must be nonnegative")
        if len(self.contracts) != n:
            raise DomainError("one contract per economy required")


@dataclass(frozen=True, eq=False)
class PortfolioSolution:
    """Coupled cutoffs and the resulting portfolio value split."""

    cutoffs: np.ndarray
    clamped: tuple[str, ...]  # none | all_served | empty per relationship
    total_value: float
    per_value: np.ndarray
    centralities: np.ndarray
    residual: float
    iterations: int


def make_portfolio(economies, delta=None, coupling=None,
                   contracts=None) -> PortfolioEconomy:
    """Assemble a portfolio; a scalar delta builds the symmetric matrix."""
    econs = tuple(economies)
    n = len(econs)
    if coupling is None:
        if delta is None:
            raise DomainError("provide delta or a coupling matrix")
        coupling = delta * (np.ones((n, n)) - np.eye(n))
    if contracts is None:
        contracts = tuple(calibrated_contract(e) for e in econs)
    return PortfolioEconomy(econs, np.asarray(coupling, float), tuple(contracts))


def symmetric_portfolio(R: float, delta: float, v: float = 2.0,
                        mu0: float = 0.0, n: int = 2) -> PortfolioEconomy:
    """Two (or n) identical benchmark relationships with common coupling."""
    from .economy import benchmark

    econs = [benchmark(v=v, mu0=mu0, R=R) for _ in range(n)]
    return make_portfolio(econs, delta=delta)


# ---------------------------------------------------------------------------
# coupled cutoffs


def symmetric_cutoff(a: float, b1: float, delta: float, v: float = 2.0):
    """Closed-form symmetric coupled cutoff on the uniform benchmark.

    (a + b1 - delta) / (v - 1 + b1 - delta), using the manifold identity
    Phi(K - a) = a; clamped to [0, 1] with the clamp reported.
    """
    denom = (v - 1.0) + b1 - delta
    if abs(denom) <= 1e-9:
        raise DegeneracyError("coupled-cutoff denominator vanishes")
    theta = (a + b1 - delta) / denom
    clamped = theta < 0.0 or theta > 1.0
    return min(max(theta, 0.0), 1.0), clamped


def symmetric_cutoff_iterative(a: float, b1: float, delta: float,
                               v: float = 2.0, phi: float | None = None,
                               x0: float = 0.5,
                               tol: Tolerance = FP_TOL) -> tuple[float, float, int]:
    """Damped fixed-point iteration of the symmetric coupled-cutoff map.

    Iterates theta <- clamp((phi + b1 - delta(1 - theta)) / (v - 1 + b1));
    phi defaults to a via the manifold identity. Returns (theta,
    residual, iterations); runs on the compiled kernel when available.
    """
    if phi is None:
        phi = a
    den = (v - 1.0) + b1
    c0 = (phi + b1 - delta) / den
    c1 = delta / den
    x, r, it = kernels.damped_affine_fp(c0, c1, x0, 0.0, 1.0, 0.5,
                                        tol.abs_f, tol.max_iter)
    return float(x), float(r), int(it)


def _cutoff_given_coupling(econ, contract, load):
    """Cutoff solving psi(theta) = -load, clamped to the support.

    load is the complementarity mass from the other relationships, so
    the effective implementation threshold weakly falls as load rises.
    """
    d = econ.dist
    a, b1 = contract.advance, contract.slope

    def g(t):
        return float(virtual_surplus(econ, t, a, b1)) + load

    if g(d.lower) >= 0.0:
        return d.lower, "all_served"
    if g(d.upper) < 0.0:
        return d.upper, "empty"
    return find_root(g, Bracket(d.lower, d.upper), Tolerance()), "none"


def solve_cutoffs(port: PortfolioEconomy,
                  tol: Tolerance = FP_TOL) -> PortfolioSolution:
    """Damped fixed point of the coupled-cutoff system.

    Starts from the uncoupled cutoffs; each step re-solves every
    relationship's threshold at the current complementarity load.
    """
    n = len(port.economies)
    tails = lambda x: np.array(  # noqa: E731
        [1.0 - float(port.economies[i].dist.cdf(x[i])) for i in range(n)])

    def g(x):
        load = port.coupling @ tails(x)
        return np.array([_cutoff_given_coupling(port.economies[i],
                                                port.contracts[i],
                                                float(load[i]))[0]
                         for i in range(n)])

    x0 = np.array([cutoff(e, c.advance, c.slope)
                   for e, c in zip(port.economies, port.contracts)])
    x, residual, iters = fixed_point(g, x0, tol)
    load = port.coupling @ tails(x)
    clamped = tuple(_cutoff_given_coupling(port.economies[i], port.contracts[i],
                                           float(load[i]))[1] for i in range(n))
    total, per = portfolio_value(port, x)
    cents = _all_centralities(port, x, clamped)
    return PortfolioSolution(cutoffs=x, clamped=clamped, total_value=total,
                             per_value=per, centralities=cents,
                             residual=residual, iterations=iters)


def portfolio_value(port: PortfolioEconomy, cutoffs) -> tuple[float, np.ndarray]:
    """Portfolio value at given cutoffs, with a per-relationship split.

    Each relationship books its own screening value minus its advance;
    every pairwise complementarity term counts once in the total and is
    split half-and-half between the two relationships involved.
    """
    x = np.asarray(cutoffs, float)
    n = len(port.economies)
    tails = np.array([1.0 - float(port.economies[i].dist.cdf(x[i]))
                      for i in range(n)])
    per = np.empty(n)
    for i, (e, c) in enumerate(zip(port.economies, port.contracts)):
        d = e.dist
        if x[i] >= d.upper:
            base = 0.0
        else:
            base = integrate(
                lambda t: virtual_surplus(e, t, c.advance, c.slope)
                * np.asarray(d.pdf(t), float), float(x[i]), d.upper, 256)
        pair = 0.5 * float(np.sum(port.coupling[i] * tails)) * tails[i]
        per[i] = base + pair - c.advance
    return float(np.sum(per)), per


# ---------------------------------------------------------------------------
# contagion derivatives and thresholds


def _rebuild(port: PortfolioEconomy, j: int, R_j: float,
             resolve_contracts: bool) -> PortfolioEconomy:
    econs = list(port.economies)
    econs[j] = with_tightness(econs[j], R_j)
    contracts = list(port.contracts)
    if resolve_contracts:
        contracts[j] = calibrated_contract(econs[j])
    return PortfolioEconomy(tuple(econs), port.coupling, tuple(contracts))


def fd_cutoff_sensitivity(port: PortfolioEconomy, j: int, h: float = 1e-4,
                          resolve_contracts: bool = False) -> np.ndarray:
    """Finite-difference response of all cutoffs to relationship j's tightness."""
    R_j = port.economies[j].financing.tightness
    up = solve_cutoffs(_rebuild(port, j, R_j + h, resolve_contracts)).cutoffs
    dn = solve_cutoffs(_rebuild(port, j, R_j - h, resolve_contracts)).cutoffs
    return (up - dn) / (2.0 * h)


def _jacobian_sensitivity(port, cutoffs, clamped, j):
    """Cutoff responses to R_j at fixed contracts via the implicit system.

    Rows of clamped relationships are frozen (their cutoffs sit at a
    support endpoint and do not move locally).
    """
    n = len(port.economies)
    jac = np.zeros((n, n))
    rhs = np.zeros(n)
    for i, (e, c) in enumerate(zip(port.economies, port.contracts)):
        if clamped[i] != "none":
            jac[i, i] = 1.0
            continue
        t = float(cutoffs[i])
        h = 1e-6
        dpsi = (float(virtual_surplus(e, t + h, c.advance, c.slope))
                - float(virtual_surplus(e, t - h, c.advance, c.slope))) / (2 * h)
        jac[i, i] = dpsi
        for k in range(n):
            if k != i and clamped[k] == "none":
                jac[i, k] -= port.coupling[i, k] \
                    * float(port.economies[k].dist.pdf(cutoffs[k]))
        if i == j:
            ell = e.working_capital - c.advance
            rhs[i] = marginal_r(e.financing, ell)
    try:
        return np.linalg.solve(jac, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError(f"singular cutoff Jacobian: {exc}") from exc


def contagion_centrality(port: PortfolioEconomy, sol: PortfolioSolution,
                         j: int) -> float:
    """Coupling-weighted response of other cutoffs to j's credit tightness."""
    sens = _jacobian_sensitivity(port, sol.cutoffs, sol.clamped, j)
    return float(sum(port.coupling[i, j] * sens[i]
                     for i in range(len(port.economies)) if i != j))


def _all_centralities(port, cutoffs, clamped):
    n = len(port.economies)
    out = np.empty(n)
    for j in range(n):
        sens = _jacobian_sensitivity(port, cutoffs, clamped, j)
        out[j] = sum(port.coupling[i, j] * sens[i] for i in range(n) if i != j)
    return out


def contagion_derivative(port: PortfolioEconomy, j: int,
                         h: float = 1e-4, analytic_only: bool = False) -> dict:
    """Total and decomposed response of portfolio value to R_j.

    total is a central finite difference with contracts re-calibrated at
    the shifted tightness (nan when analytic_only skips it). The analytic
    decomposition uses the envelope property of the coupled cutoffs:
    direct_financing is the mechanical financing-cost effect at fixed
    contracts, screening_spillover the contract-response terms. flagged
    marks corner contracts, where the schedule derivative is one-sided.
    """
    base = solve_cutoffs(port)
    e_j = port.economies[j]
    c_j = port.contracts[j]
    R_j = e_j.financing.tightness
    if analytic_only:
        total = math.nan
    else:
        up = solve_cutoffs(_rebuild(port, j, R_j + h, True)).total_value
        dn = solve_cutoffs(_rebuild(port, j, R_j - h, True)).total_value
        total = (up - dn) / (2.0 * h)

    d = e_j.dist
    that = float(base.cutoffs[j])
    tail = 1.0 - float(d.cdf(that))
    ell = e_j.working_capital - c_j.advance
    b1p = slope_calibration_prime(R_j)
    ap = advance_response(e_j, c_j.slope, b1p)
    if that >= d.upper:
        rent_sens = 0.0
    else:
        rent_sens = integrate(
            lambda t: (np.asarray(e_j.signal_mean_prime(t), float)
                       if e_j.signal_mean_prime is not None
                       else np.full_like(np.asarray(t, float),
                                         signal_prime_at(e_j, that)))
            * (1.0 - np.asarray(d.cdf(t), float)), that, d.upper, 256)
    direct = -marginal_r(e_j.financing, ell) * tail
    spillover = ap * (marginal_ell(e_j.financing, ell) * tail - 1.0) \
        - b1p * rent_sens
    K = e_j.working_capital
    flagged = (c_j.advance <= 1e-9 or c_j.advance >= K - 1e-9
               or c_j.slope <= 1e-9)
    return {"total": total, "direct_financing": direct,
            "screening_spillover": spillover,
            "analytic": direct + spillover, "flagged": flagged}


def contagion_threshold(econ: EconomyPrimitives,
                        delta_grid=None) -> dict:
    """Coupling strength at which tighter credit starts raising book value.

    analytic inverts the sign condition of the fixed-contract value
    derivative at the uncoupled cutoff; empirical scans a coupling grid
    for the first sign flip of the full finite-difference derivative
    (contracts re-calibrated).
    """
    c = calibrated_contract(econ)
    if c.slope <= 1e-12:
        raise DegeneracyError("calibrated slope is zero; threshold undefined")
    K = econ.working_capital
    ell = K - c.advance
    that = cutoff(econ, c.advance, c.slope)
    tail = 1.0 - float(econ.dist.cdf(that))
    if tail <= 1e-12:
        raise DegeneracyError("uncoupled service set is empty")
    analytic = (K - c.advance) * (1.0 + c.slope) \
        * marginal_r(econ.financing, ell) / (c.slope * tail)
    if delta_grid is None:
        delta_grid = np.arange(0.0, 2.5 + 1e-9, 0.05)
    empirical = math.nan
    R = econ.financing.tightness
    for dlt in delta_grid:
        port = symmetric_portfolio(R, float(dlt))
        if contagion_derivative(port, 0)["total"] > 0.0:
            empirical = float(dlt)
            break
    return {"analytic": float(analytic), "empirical": empirical}


# ---------------------------------------------------------------------------
# book-level comparative statics


def hump_scan(R_grid, delta: float, v: float = 2.0, mu0: float = 0.0) -> dict:
    """Portfolio value along a common-tightness path with fixed coupling.

    Returns grid values, finite-difference slopes, the sub-intervals
    where the slope is positive, and the interior peak if one exists.
    """
    Rs = np.asarray(R_grid, float)
    vals = np.array([solve_cutoffs(symmetric_portfolio(float(R), delta,
                                                       v=v, mu0=mu0)).total_value
                     for R in Rs])
    slopes = np.diff(vals) / np.diff(Rs)
    positive = []
    start = None
    for i, s in enumerate(slopes):
        if s > 0 and start is None:
            start = Rs[i]
        if s <= 0 and start is not None:
            positive.append((float(start), float(Rs[i])))
            start = None
    if start is not None:
        positive.append((float(start), float(Rs[-1])))
    peak = None
    i_max = int(np.argmax(vals))
    if 0 < i_max < len(Rs) - 1:
        peak = float(Rs[i_max])
    return {"R": Rs, "value": vals, "slope": slopes,
            "positive_intervals": positive, "peak": peak}


def _bilateral_value_at(econ: EconomyPrimitives, contract: Contract) -> float:
    """Uncoupled screening value of a given contract, net of the advance."""
    d = econ.dist
    that = cutoff(econ, contract.advance, contract.slope)
    if that >= d.upper:
        base = 0.0
    else:
        base = integrate(lambda t: virtual_surplus(econ, t, contract.advance,
                                                   contract.slope)
                         * np.asarray(d.pdf(t), float), that, d.upper, 256)
    return base - contract.advance


def breadth_comparison(port: PortfolioEconomy,
                       single: str = "reoptimized") -> dict:
    """Two coupled relationships against independent bilateral ones.

    Prefers narrow sourcing when twice the single-relationship value
    exceeds the coupled book value. single="reoptimized" lets the stand-
    alone relationship use its unconstrained mixed-program optimum (the
    relevant comparison when dropping a counterparty frees the contract);
    single="matched" keeps the portfolio's own contract, which makes the
    zero-coupling case an exact tie.
    """
    dual = solve_cutoffs(port).total_value
    if single == "reoptimized":
        w1 = solve_mixed(port.economies[0]).value
    elif single == "matched":
        w1 = _bilateral_value_at(port.economies[0], port.contracts[0])
    else:
        raise DomainError(f"unknown single-value convention {single!r}")
    return {"dual_value": dual, "single_value": w1,
            "prefer_single": 2.0 * w1 > dual}


def uniform_subsidy_effect(R: float, delta: float, dR: float = 0.05,
                           v: float = 2.0, mu0: float = 0.0) -> dict:
    """Per-relationship value change when every tightness falls by dR."""
    base = solve_cutoffs(symmetric_portfolio(R, delta, v=v, mu0=mu0))
    subs = solve_cutoffs(symmetric_portfolio(R - dR, delta, v=v, mu0=mu0))
    change = subs.per_value - base.per_value
    return {"pi_base": base.per_value, "pi_subsidized": subs.per_value,
            "change": change,
            "all_lower": bool(np.all(change < 0.0)),
            "all_higher": bool(np.all(change > 0.0))}


def independent_cutoff_value(port: PortfolioEconomy) -> dict:
    """Value lost by running book cutoffs at their uncoupled positions.

    Evaluates the coupled objective at the bilateral cutoffs and
    reports the relative shortfall against the coupled optimum.
    """
    sol = solve_cutoffs(port)
    x_ind = np.array([cutoff(e, c.advance, c.slope)
                      for e, c in zip(port.economies, port.contracts)])
    v_ind, _ = portfolio_value(port, x_ind)
    if abs(sol.total_value) < 1e-12:
        raise DegeneracyError("coupled value is zero; relative loss undefined")
    return {"coupled": sol.total_value, "at_independent": v_ind,
            "relative_loss": (v_ind - sol.total_value) / abs(sol.total_value)}
