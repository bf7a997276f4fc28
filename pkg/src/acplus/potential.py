"""Bistable reaction terms and admissible obstacle levels.

A reaction f is *bistable* when it has exactly three roots
a_minus < a_zero < a_plus with stable outer wells (f' > 0 at a_minus and
a_plus), f > 0 on (a_minus, a_zero) and f < 0 on (a_zero, a_plus).
Only polynomial reactions are supported so that derivatives and the
primitive are exact; the primitive W is pinned by W(a_minus) = 0, and all
downstream formulas use only differences of W.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.integrate import quad

ArrayLike = Union[float, np.ndarray]

ROOT_RESIDUAL_TOL = 1e-12
SEMICONVEXITY_TOL = 1e-12


def _polyval(coeffs: tuple[float, ...], s: ArrayLike) -> ArrayLike:
    # Horner on ascending coefficients; works for scalars and arrays.
    acc = 0.0 * np.asarray(s, dtype=float) if isinstance(s, np.ndarray) else 0.0
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def _polyder(coeffs: tuple[float, ...]) -> tuple[float, ...]:
    if len(coeffs) <= 1:
        return (0.0,)
    return tuple(k * c for k, c in enumerate(coeffs) if k >= 1)


def _polyint(coeffs: tuple[float, ...]) -> tuple[float, ...]:
    return (0.0,) + tuple(c / (k + 1) for k, c in enumerate(coeffs))


@dataclass(frozen=True)
class Nonlinearity:
    """Polynomial bistable reaction with its roots, slope bound and primitive.

    Attributes
    ----------
    coeffs : tuple
        Ascending polynomial coefficients of f.
    a_minus, a_zero, a_plus : float
        Declared roots of f.
    lam : float
        Semiconvexity constant: f' >= -lam on the working range.
    """

    coeffs: tuple[float, ...]
    a_minus: float
    a_zero: float
    a_plus: float
    lam: float
    _dcoeffs: tuple[float, ...] = field(init=False, repr=False)
    _d2coeffs: tuple[float, ...] = field(init=False, repr=False)
    _wcoeffs: tuple[float, ...] = field(init=False, repr=False)
    _w_offset: float = field(init=False, repr=False)

    def __post_init__(self):
        dc = _polyder(self.coeffs)
        object.__setattr__(self, "_dcoeffs", dc)
        object.__setattr__(self, "_d2coeffs", _polyder(dc))
        wc = _polyint(self.coeffs)
        object.__setattr__(self, "_wcoeffs", wc)
        # normalize the primitive so W(a_minus) = 0
        object.__setattr__(self, "_w_offset", float(_polyval(wc, self.a_minus)))

    def value(self, s: ArrayLike) -> ArrayLike:
        """f(s)."""
        return _polyval(self.coeffs, s)

    def deriv(self, s: ArrayLike) -> ArrayLike:
        """f'(s)."""
        return _polyval(self._dcoeffs, s)

    def deriv2(self, s: ArrayLike) -> ArrayLike:
        """f''(s)."""
        return _polyval(self._d2coeffs, s)

    def primitive(self, s: ArrayLike) -> ArrayLike:
        """W(s) = integral of f from a_minus to s."""
        return _polyval(self._wcoeffs, s) - self._w_offset

    def sup_abs_value(self, lo: float | None = None, hi: float | None = None, n: int = 4001) -> float:
        """Sampled sup of |f| on [lo, hi] (defaults to [a_minus, a_plus])."""
        lo = self.a_minus if lo is None else lo
        hi = self.a_plus if hi is None else hi
        return float(np.max(np.abs(self.value(np.linspace(lo, hi, n)))))

    def sup_abs_deriv(self, lo: float | None = None, hi: float | None = None, n: int = 4001) -> float:
        """Sampled sup of |f'| on [lo, hi] (defaults to [a_minus, a_plus])."""
        lo = self.a_minus if lo is None else lo
        hi = self.a_plus if hi is None else hi
        return float(np.max(np.abs(self.deriv(np.linspace(lo, hi, n)))))


def make_cubic() -> Nonlinearity:
    """The standard cubic f(u) = u^3 - u with roots (-1, 0, 1) and lam = 1."""
    return Nonlinearity(coeffs=(0.0, -1.0, 0.0, 1.0), a_minus=-1.0, a_zero=0.0, a_plus=1.0, lam=1.0)


def make_polynomial(coeffs, roots, lam) -> Nonlinearity:
    """Build a reaction from ascending coefficients, declared roots and lam."""
    a_minus, a_zero, a_plus = (float(r) for r in roots)
    return Nonlinearity(
        coeffs=tuple(float(c) for c in coeffs),
        a_minus=a_minus,
        a_zero=a_zero,
        a_plus=a_plus,
        lam=float(lam),
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_sample: float
    worst_value: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def validate_bistable(nl: Nonlinearity, samples: int = 1000) -> ValidationReport:
    """Check every structural requirement on a declared bistable reaction.

    Never raises: the report lists each requirement with pass/fail and the
    worst violating sample so a caller can refuse a bad configuration.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    checks: list[CheckResult] = []

    ordered = nl.a_minus < nl.a_zero < nl.a_plus
    checks.append(CheckResult("roots_ordered", ordered, nl.a_zero, 0.0))

    for name, root in (("root_a_minus", nl.a_minus), ("root_a_zero", nl.a_zero), ("root_a_plus", nl.a_plus)):
        res = float(abs(nl.value(root)))
        checks.append(CheckResult(name, res <= ROOT_RESIDUAL_TOL, root, res, f"|f(root)| = {res:.3e}"))

    for name, root in (("outer_slope_a_minus", nl.a_minus), ("outer_slope_a_plus", nl.a_plus)):
        d = float(nl.deriv(root))
        checks.append(CheckResult(name, d > 0.0, root, d, f"f'(root) = {d:.3e}"))

    # interior sign conditions, sampled strictly inside the open intervals
    grid_lo = np.linspace(nl.a_minus, nl.a_zero, samples + 2)[1:-1]
    v_lo = np.asarray(nl.value(grid_lo))
    i = int(np.argmin(v_lo))
    checks.append(CheckResult("positive_on_left_well", bool(v_lo.min() > 0.0), float(grid_lo[i]), float(v_lo[i])))

    grid_hi = np.linspace(nl.a_zero, nl.a_plus, samples + 2)[1:-1]
    v_hi = np.asarray(nl.value(grid_hi))
    i = int(np.argmax(v_hi))
    checks.append(CheckResult("negative_on_right_well", bool(v_hi.max() < 0.0), float(grid_hi[i]), float(v_hi[i])))

    grid_w = np.linspace(nl.a_minus - 1.0, nl.a_plus + 1.0, samples)
    slack = np.asarray(nl.deriv(grid_w)) + nl.lam
    i = int(np.argmin(slack))
    checks.append(
        CheckResult(
            "semiconvexity",
            bool(slack.min() >= -SEMICONVEXITY_TOL),
            float(grid_w[i]),
            float(slack[i]),
            "min of f' + lam on the widened range",
        )
    )
    return ValidationReport(tuple(checks))


@dataclass(frozen=True)
class AdmissibleAlpha:
    """An obstacle level alpha together with the admissibility facts about it."""

    alpha: float
    integral_to_aplus: float
    satisfies_hyp: bool
    satisfies_hyp2: bool
    fprime_positive: bool
    reason: str | None = None


def check_alpha(nl: Nonlinearity, alpha: float) -> AdmissibleAlpha:
    """Classify an obstacle level.

    The defining integral of f over [alpha, a_plus] is computed by adaptive
    quadrature (abs tol 1e-12) rather than from the exact primitive, so this
    doubles as an independent consistency check on the primitive.
    """
    alpha = float(alpha)
    integral, _ = quad(nl.value, alpha, nl.a_plus, epsabs=1e-12, limit=200)
    integral_full, _ = quad(nl.value, nl.a_minus, nl.a_plus, epsabs=1e-12, limit=200)
    in_range = nl.a_minus < alpha < nl.a_zero
    hyp = in_range and integral < 0.0
    hyp2 = in_range and integral_full <= 0.0
    reason = None
    if not in_range:
        reason = f"alpha = {alpha} is outside the open interval ({nl.a_minus}, {nl.a_zero})"
    elif not hyp:
        reason = f"integral of f over [alpha, a_plus] = {integral:.6e} is not negative"
    return AdmissibleAlpha(
        alpha=alpha,
        integral_to_aplus=float(integral),
        satisfies_hyp=hyp,
        satisfies_hyp2=hyp2,
        fprime_positive=bool(nl.deriv(alpha) > 0.0),
        reason=reason,
    )
