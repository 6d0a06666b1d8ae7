"""Work statistics of the cyclically driven bath.

Second-order quantities (characteristic function, work density, mean
work, no-transition weight) are frequency integrals of the Green-function
channels against the drive measure; the all-order characteristic function
of the pure bath is their exponential resummation.  Everything here is a
pure function of the spec, so grid-parallel evaluation is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import quadrature
from .green import GreenPair, green_pair
from .model import DrivenSource, FrequencyGrid, SystemSpec, require_valid
from .quadrature import InversionPlan, default_plan, integrate_lambda, lambda_weight

#: continuous densities this far below zero are clipped (FFT ringing);
#: anything lower means the perturbative constraint is genuinely broken
NEGATIVE_DENSITY_TOL = 1e-12

#: density floor below which a reverse/forward ratio is meaningless
CROOKS_FLOOR = 1e-300


class ConstraintError(ValueError):
    """Positivity of the second-order work distribution is violated."""


class PerturbativeBreakdownError(RuntimeError):
    """chi2(i beta) came out non-positive; its log is undefined."""


@dataclass(frozen=True)
class WorkDistribution:
    """Atom at W = 0 plus a sampled continuous density.

    ``imag_residue`` is the largest imaginary part discarded when the
    density came out of an inverse transform; ``clipped`` counts grid
    points whose slightly negative values were set to zero.
    """

    atom_weight: float
    w_grid: np.ndarray
    density: np.ndarray
    imag_residue: float = 0.0
    clipped: int = 0

    @property
    def normalization(self) -> float:
        return self.atom_weight + float(
            np.trapezoid(self.density, self.w_grid))


@dataclass(frozen=True)
class PositivityReport:
    """Value of the channel-sum integral and whether it sits inside (0, 2)."""

    value: float
    passed: bool
    message: str = ""


def _grid_for(spec: SystemSpec,
              grid: Optional[FrequencyGrid]) -> FrequencyGrid:
    return grid if grid is not None else FrequencyGrid.for_source(spec.source)


def default_i_beta_grid(spec: SystemSpec) -> FrequencyGrid:
    """Window for the detailed-balance probe at v = i beta.

    That integrand grows like e^{beta |w|} before the drive envelope cuts
    it, so its Gaussian peak is shifted by beta/(4 t_int^2); the window is
    widened by that amount to keep the truncated tail below tail_eps of
    the peak (drive-only sizing misses a ~1e-11 tail at beta ~ 1e3).
    """
    base = FrequencyGrid.for_source(spec.source)
    shift = spec.beta / (4.0 * spec.source.t_int ** 2)
    return replace(base, omega_max=base.omega_max + shift)


def _integrate(f, spec: SystemSpec, pair: GreenPair,
               grid: Optional[FrequencyGrid], complex_valued=False):
    return integrate_lambda(
        f, spec.source, _grid_for(spec, grid),
        breakpoints=pair.edges,
        singular_exponent=pair.singular_exponent,
        complex_valued=complex_valued)


def default_w_grid(source: DrivenSource, n: int = 800) -> np.ndarray:
    """Symmetric work grid covering the drive support, excluding W = 0.

    Even ``n`` keeps 0 off the grid so the continuous part never double
    counts the atom.
    """
    if n % 2:
        raise ValueError("n must be even to keep W = 0 off the grid")
    w_max = FrequencyGrid.for_source(source).omega_max
    return np.linspace(-w_max, w_max, n)


def chi2(v: complex, spec: SystemSpec,
         grid: Optional[FrequencyGrid] = None) -> complex:
    """Second-order characteristic function at transform variable v.

    chi2(0) = 1 identically (the integrand vanishes), and for real v the
    value at -v is the complex conjugate.
    """
    require_valid(spec)
    pair = green_pair(spec)

    def f(w):
        return ((1.0 - np.exp(1j * w * v)) * pair.g_mp(w)
                + (1.0 - np.exp(-1j * w * v)) * pair.g_pm(w))

    return 1.0 - 0.5 * _integrate(f, spec, pair, grid, complex_valued=True)


def chi2_at_i_beta(spec: SystemSpec,
                   grid: Optional[FrequencyGrid] = None) -> float:
    """chi2 continued to v = i*beta, the detailed-balance deficit probe.

    Equals 1 for the pure thermal bath (both channels are evaluated and
    the integrand cancels pointwise to roundoff; no identity is assumed).
    All exponentials act on the windowed frequency, so the evaluation
    stays in range for beta up to ~1e3 at the default drive.
    """
    require_valid(spec)
    pair = green_pair(spec)
    beta = spec.beta

    def f(w):
        return (-np.expm1(-beta * w) * pair.g_mp(w)
                - np.expm1(beta * w) * pair.g_pm(w))

    if grid is None:
        grid = default_i_beta_grid(spec)
    value = 1.0 - 0.5 * _integrate(f, spec, pair, grid)
    if value <= 0.0:
        raise PerturbativeBreakdownError(
            f"perturbative breakdown: chi2(i beta) = {value:g} <= 0, "
            "log undefined")
    return value


def channel_sum_integral(spec: SystemSpec,
                         grid: Optional[FrequencyGrid] = None) -> float:
    """The integral of g_mp + g_pm against the drive measure (= 2(1 - p0))."""
    require_valid(spec)
    pair = green_pair(spec)
    return _integrate(lambda w: pair.g_mp(w) + pair.g_pm(w), spec, pair, grid)


def positivity_check(spec: SystemSpec,
                     grid: Optional[FrequencyGrid] = None) -> PositivityReport:
    """Whether the channel-sum integral sits strictly inside (0, 2).

    Outside that window the second-order distribution cannot be a
    probability (the atom weight leaves (0, 1)); the report says so
    instead of clipping anything.
    """
    value = channel_sum_integral(spec, grid)
    if value <= 0.0:
        return PositivityReport(value, False, "not strictly positive")
    if value >= 2.0:
        return PositivityReport(
            value, False,
            "channel-sum integral >= 2: no-transition weight would be "
            "negative; reduce lambda0")
    return PositivityReport(value, True)


def atom_weight2(spec: SystemSpec,
                 grid: Optional[FrequencyGrid] = None) -> float:
    """Second-order no-transition weight p0 = 1 - channel_sum/2."""
    report = positivity_check(spec, grid)
    if not report.passed:
        raise ConstraintError(
            f"positivity constraint violated ({report.message}); "
            "reduce lambda0")
    return 1.0 - 0.5 * report.value


def wdf2(spec: SystemSpec, w_grid: Optional[np.ndarray] = None,
         grid: Optional[FrequencyGrid] = None) -> WorkDistribution:
    """Second-order work distribution on ``w_grid``.

    density(W) = |lam(W)|^2 [g_mp(W) + g_pm(-W)] / 4 pi, with the atom
    p0 carried separately.  The default grid excludes W = 0.
    """
    atom = atom_weight2(spec, grid)
    w = default_w_grid(spec.source) if w_grid is None else \
        np.asarray(w_grid, dtype=float)
    pair = green_pair(spec)
    dens = lambda_weight(w, spec.source) / (4.0 * math.pi) * (
        np.asarray(pair.g_mp(w)) + np.asarray(pair.g_pm(-w)))
    dens, clipped = _clip_density(dens)
    return WorkDistribution(atom_weight=atom, w_grid=w, density=dens,
                            clipped=clipped)


def _clip_density(dens: np.ndarray) -> tuple[np.ndarray, int]:
    low = float(dens.min(initial=0.0))
    if low < -NEGATIVE_DENSITY_TOL:
        raise ConstraintError(
            f"density reached {low:g} < -{NEGATIVE_DENSITY_TOL:g}: "
            "perturbative positivity violated; reduce lambda0")
    negatives = dens < 0.0
    if negatives.any():
        dens = np.where(negatives, 0.0, dens)
    return dens, int(np.count_nonzero(negatives))


def w_ext2(spec: SystemSpec, grid: Optional[FrequencyGrid] = None) -> float:
    """Second-order work extraction -(1/2) int_lam w [g_mp - g_pm].

    Equals minus the mean work; nonpositive for the pure thermal bath
    (passivity), either sign once a qubit breaks detailed balance.
    """
    require_valid(spec)
    pair = green_pair(spec)
    return -0.5 * _integrate(
        lambda w: w * (pair.g_mp(w) - pair.g_pm(w)), spec, pair, grid)


def mean_work2(spec: SystemSpec, grid: Optional[FrequencyGrid] = None) -> float:
    """Mean work of the second-order statistics (= -w_ext2)."""
    return -w_ext2(spec, grid)


def mean_work_finite_difference(spec: SystemSpec, h: float = 1e-4,
                                grid: Optional[FrequencyGrid] = None) -> float:
    """-i d(chi2)/dv at v = 0 by Richardson-extrapolated central steps.

    Test-side cross-check only; production mean work comes from the
    frequency integral.  The imaginary part of chi2 is integrated
    separately from the real part, so no cancellation against chi2 ~ 1
    occurs.
    """
    def central(step: float) -> complex:
        return (chi2(step, spec, grid) - chi2(-step, spec, grid)) / (2 * step)

    coarse = central(h)
    fine = central(h / 2.0)
    derivative = (4.0 * fine - coarse) / 3.0
    return float((-1j * derivative).real)


@dataclass(frozen=True)
class CrooksRatio:
    """Reverse-to-forward density ratio sampled on a symmetric grid.

    ``skipped`` lists grid values whose forward density sat below the
    evaluation floor; those points carry NaN.
    """

    w_grid: np.ndarray
    values: np.ndarray
    skipped: tuple[float, ...] = ()

    def __call__(self, w: float) -> float:
        idx = int(np.argmin(np.abs(self.w_grid - w)))
        if not math.isclose(self.w_grid[idx], w, rel_tol=1e-9, abs_tol=1e-15):
            raise ValueError(f"W = {w:g} is not on the distribution grid")
        return float(self.values[idx])


def crooks_ratio(dist: WorkDistribution, beta: float) -> CrooksRatio:
    """density(-W)/density(W) over the grid of ``dist``.

    Requires a sign-symmetric grid so each W has its mirror; for a pure
    thermal bath the result equals e^{-beta W} pointwise (the fluctuation
    ratio), while qubit-coupled deviations from that are the observable.
    ``beta`` is accepted for the caller's comparison and not used in the
    ratio itself.
    """
    w = dist.w_grid
    mirrored = np.searchsorted(w, -w)
    mirrored = np.clip(mirrored, 0, w.size - 1)
    ok = np.isclose(w[mirrored], -w, rtol=1e-12, atol=1e-300)
    values = np.full(w.size, np.nan)
    skipped: list[float] = []
    forward = dist.density
    for i in np.nonzero(ok)[0]:
        if forward[i] <= CROOKS_FLOOR:
            skipped.append(float(w[i]))
            continue
        values[i] = forward[mirrored[i]] / forward[i]
    return CrooksRatio(w_grid=w, values=values, skipped=tuple(skipped))


def chi_nonperturbative(v: complex, spec: SystemSpec,
                        grid: Optional[FrequencyGrid] = None) -> complex:
    """All-order characteristic function e^{chi2(v) - 1}, pure bath only.

    No closed resummation exists once a qubit is attached (the coupling
    is quadratic in the channel basis), so that case is refused.
    """
    if spec.qubit is not None:
        raise ValueError(
            "all-order characteristic function is available only for the "
            "pure thermal bath")
    return complex(np.exp(chi2(v, spec, grid) - 1.0))


# -- sampled fields and inversion -------------------------------------------

@dataclass(frozen=True)
class ChiField:
    """chi2 sampled on a v grid, kept in atom + residual split form.

    ``tail`` is T(v) = chi2(v) - p0: it decays to zero at large |v| and
    is the numerically clean object to transform (the all-order residual
    is atom * expm1(T), evaluated without cancellation).
    """

    v_grid: np.ndarray
    p0: float
    tail: np.ndarray

    def chi2_values(self) -> np.ndarray:
        return self.p0 + self.tail


def chi2_field(spec: SystemSpec, v: np.ndarray,
               grid: Optional[FrequencyGrid] = None) -> ChiField:
    """Sample chi2 on an arbitrary v grid via one Gauss-Legendre node set.

    Both drive-weighted channel transforms share the same nodes, v = 0 is
    always part of the sampled set, and v < 0 values come from the
    conjugate symmetry of real densities; chi2(0) = 1 therefore holds on
    the field to within one rounding of p0 + T(0).
    """
    require_valid(spec)
    v = np.asarray(v, dtype=float)
    pair = green_pair(spec)
    u, inverse = np.unique(np.abs(v), return_inverse=True)
    if u.size == 0 or u[0] != 0.0:
        u = np.concatenate([[0.0], u])
        inverse = inverse + 1
    a_mp, a_pm = quadrature.oscillatory_pair(
        pair.g_mp, pair.g_pm, u, spec.source, _grid_for(spec, grid),
        breakpoints=pair.edges, singular_exponent=pair.singular_exponent)
    p0 = 1.0 - 0.5 * float(a_mp[0].real + a_pm[0].real)
    # T(v) = (A_mp(v) + conj(A_pm(v)))/2 for v >= 0, conjugate below
    tail_u = 0.5 * (a_mp + np.conj(a_pm))
    tail = tail_u[inverse]
    negative = v < 0.0
    tail[negative] = np.conj(tail[negative])
    return ChiField(v_grid=v, p0=p0, tail=tail)


NORMALIZATION_WARN = 1e-6
NORMALIZATION_ABORT = 1e-4


class InversionError(RuntimeError):
    """The FFT window failed to capture the distribution."""


def _distribution_from_residual(residual: np.ndarray, atom: float,
                                plan: InversionPlan) -> WorkDistribution:
    w, complex_density = quadrature.invert_samples(residual, plan)
    imag_residue = float(np.max(np.abs(complex_density.imag), initial=0.0))
    density, clipped = _clip_density(complex_density.real.copy())
    dist = WorkDistribution(atom_weight=atom, w_grid=w, density=density,
                            imag_residue=imag_residue, clipped=clipped)
    defect = abs(dist.normalization - 1.0)
    if defect > NORMALIZATION_ABORT:
        raise InversionError(
            f"inversion window too small: normalization off by {defect:.3e}")
    return dist


def invert_characteristic(chi: Callable[[np.ndarray], np.ndarray],
                          plan: InversionPlan) -> WorkDistribution:
    """Recover the distribution behind a characteristic function.

    ``chi`` must accept the full v grid of the plan as an array and
    satisfy chi(0) = 1 to 1e-10; ``plan.atom_weight`` is subtracted
    before the transform and re-added as the explicit atom.
    """
    v = plan.v_grid()
    values = np.asarray(chi(v), dtype=complex)
    v0 = plan.n_fft // 2
    if abs(values[v0] - 1.0) > 1e-10:
        raise ValueError(
            f"chi(0) = {values[v0]:g} differs from 1 beyond 1e-10")
    return _distribution_from_residual(values - plan.atom_weight,
                                       plan.atom_weight, plan)


def wdf_nonperturbative(spec: SystemSpec,
                        plan: Optional[InversionPlan] = None,
                        grid: Optional[FrequencyGrid] = None
                        ) -> WorkDistribution:
    """All-order work distribution of the pure bath by FFT inversion.

    The atom is e^{p0 - 1} and the transform residual is evaluated as
    atom * expm1(T(v)), which keeps the full relative accuracy of the
    tail; the caller's plan atom, if any, is overridden by that value.
    Against the second-order density this resummation carries the small
    oscillatory corrections (self-convolutions of the tail).
    """
    if spec.qubit is not None:
        raise ValueError(
            "all-order characteristic function is available only for the "
            "pure thermal bath")
    if plan is None:
        plan = default_plan(spec.source)
    field = chi2_field(spec, plan.v_grid(), grid)
    atom = math.exp(field.p0 - 1.0)
    residual = atom * np.expm1(field.tail)
    plan = replace(plan, atom_weight=atom)
    return _distribution_from_residual(residual, atom, plan)


def wdf2_from_inversion(spec: SystemSpec,
                        plan: Optional[InversionPlan] = None,
                        grid: Optional[FrequencyGrid] = None
                        ) -> WorkDistribution:
    """Second-order distribution through the same FFT pipeline.

    Matches :func:`wdf2` up to window-truncation artifacts; its purpose
    is comparisons against :func:`wdf_nonperturbative` on an identical
    grid, where those artifacts cancel.
    """
    if plan is None:
        plan = default_plan(spec.source)
    field = chi2_field(spec, plan.v_grid(), grid)
    plan = replace(plan, atom_weight=field.p0)
    return _distribution_from_residual(field.tail.copy(), field.p0, plan)


def correction_field(spec: SystemSpec,
                     plan: Optional[InversionPlan] = None,
                     grid: Optional[FrequencyGrid] = None):
    """(w, P - P2) difference of all-order and second-order densities.

    Transforming the residual difference atom*expm1(T) - T in a single
    FFT cancels the shared window truncation exactly, exposing the pure
    fourth-order-and-up correction; computing the two densities
    separately and subtracting would bury it in shared artifacts.
    """
    if spec.qubit is not None:
        raise ValueError(
            "all-order characteristic function is available only for the "
            "pure thermal bath")
    if plan is None:
        plan = default_plan(spec.source)
    field = chi2_field(spec, plan.v_grid(), grid)
    atom = math.exp(field.p0 - 1.0)
    diff = atom * np.expm1(field.tail) - field.tail
    w, density = quadrature.invert_samples(diff, plan)
    return w, density.real
