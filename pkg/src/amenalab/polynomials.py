"""Exact polynomial arithmetic, notch functions, Bernstein approximation with a
pinned root at the origin, the shifted division identity, and sup norms.

Coefficients are Fractions in ascending degree, so every algebraic identity
(division, reconstruction, vanishing constant term) holds exactly.  Dense-grid
evaluation converts to Bernstein form on the interval of interest and runs a
float de Casteljau sweep: high-degree monomial Horner in float is unusable
here because the exact coefficients grow combinatorially large.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple, Sequence, Union

import numpy as np

from .scalars import as_fraction
from .spectrum import SpectrumSequence

DEFAULT_GRID = 4096
NOTCH_WIDTH_DIVISOR = 64


class InternalConsistencyError(RuntimeError):
    """An algebraic identity that must hold exactly failed to hold."""


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with exact rational coefficients, ascending degree, trimmed."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = [as_fraction(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((as_fraction(c),))

    @classmethod
    def monomial(cls, power: int, c=1) -> "Polynomial":
        return cls((Fraction(0),) * power + (as_fraction(c),))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def vanishes_at_zero(self) -> bool:
        return not self.coefficients or self.coefficients[0] == 0

    def __call__(self, z):
        """Horner evaluation; exact whenever z is exact."""
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(tuple(out))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if not self.coefficients or not other.coefficients:
                return Polynomial.zero()
            out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
            for i, a in enumerate(self.coefficients):
                if a == 0:
                    continue
                for j, b in enumerate(other.coefficients):
                    out[i + j] += a * b
            return Polynomial(tuple(out))
        c = as_fraction(other)
        return Polynomial(tuple(c * a for a in self.coefficients))

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(i * c for i, c in enumerate(self.coefficients) if i >= 1))

    def compose_affine(self, alpha, beta) -> "Polynomial":
        """Exact composition p(alpha + beta * z)."""
        alpha, beta = as_fraction(alpha), as_fraction(beta)
        res = [Fraction(0)]
        for c in reversed(self.coefficients):
            nxt = [Fraction(0)] * (len(res) + 1)
            for i, r in enumerate(res):
                nxt[i] += r * alpha
                nxt[i + 1] += r * beta
            nxt[0] += c
            res = nxt
        return Polynomial(tuple(res))

    def divided_by_z(self) -> "Polynomial":
        """Exact division by z; the constant term must vanish identically."""
        if not self.coefficients:
            return Polynomial.zero()
        if self.coefficients[0] != 0:
            raise InternalConsistencyError(
                "division by z left a nonzero remainder; the identity it encodes is broken")
        return Polynomial(self.coefficients[1:])

    def to_rational_strings(self) -> list[str]:
        """Serialize as exact rational strings in ascending degree."""
        return [str(c) for c in self.coefficients]

    @classmethod
    def from_rational_strings(cls, items: Sequence[str]) -> "Polynomial":
        return cls(tuple(Fraction(s) for s in items))


def poly_eval(p: Polynomial, z):
    """Evaluate p at z (exact for rational z)."""
    return p(z)


@dataclass(frozen=True)
class NotchFunction:
    """C^1 piecewise-cubic function on [a, b]: 0 at the origin, 1 outside the
    dip of half-width delta, rising on each side by a smoothstep.

    `anchors` holds the nonzero shifted-spectrum points flanking the dip; the
    approximation stage uses them to keep its origin pin away from the plateau.
    """

    a: Fraction
    b: Fraction
    delta: Fraction
    anchors: tuple[Fraction, ...] = ()
    smoothness_grade: int = 1

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta: must be positive")
        if not self.a <= 0 <= self.b:
            raise ValueError("the interval must contain the origin")

    def value(self, z):
        u = abs(as_fraction(z)) / self.delta
        if u >= 1:
            return Fraction(1)
        return 3 * u * u - 2 * u ** 3

    def derivative(self, z):
        z = as_fraction(z)
        u = abs(z) / self.delta
        if u >= 1 or z == 0:
            return Fraction(0)
        slope = (6 * u - 6 * u * u) / self.delta
        return slope if z > 0 else -slope

    def value_array(self, z: np.ndarray) -> np.ndarray:
        u = np.clip(np.abs(np.asarray(z, float)) / float(self.delta), 0.0, 1.0)
        return 3 * u * u - 2 * u ** 3

    def derivative_array(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, float)
        u = np.abs(z) / float(self.delta)
        inside = u < 1
        out = np.zeros_like(z)
        out[inside] = np.sign(z[inside]) * (6 * u[inside] - 6 * u[inside] ** 2) / float(self.delta)
        return out


def notch(n: int, spectrum: SpectrumSequence) -> NotchFunction:
    """Notch for the n-th character: interval [lambda_n - lambda_1, lambda_n],
    zero at the origin, one at every shifted spectrum point.

    The dip half-width is the distance to the nearest shifted spectrum point
    divided by NOTCH_WIDTH_DIVISOR, well below the Bernstein node spacing at
    the working degrees, so the plateau values survive approximation.
    """
    m = len(spectrum)
    lam_n = spectrum.lam(n)
    a = lam_n - spectrum.lam(1)
    candidates = [lam_n]
    anchors: list[Fraction] = []
    if n > 1:
        left = lam_n - spectrum.lam(n - 1)  # negative
        candidates.append(-left)
        anchors.append(left)
    if n < m:
        right = lam_n - spectrum.lam(n + 1)
        candidates.append(right)
        anchors.append(right)
    if not anchors:
        anchors.append(lam_n)
    delta = min(candidates) / NOTCH_WIDTH_DIVISOR
    return NotchFunction(a, lam_n, delta, tuple(anchors))


def unit_notch(spectrum: SpectrumSequence) -> NotchFunction:
    """Notch for the generator itself: [0, lambda_1], dip below the smallest point."""
    delta = spectrum.lam(len(spectrum)) / NOTCH_WIDTH_DIVISOR
    return NotchFunction(Fraction(0), spectrum.lam(1), delta,
                         (spectrum.lam(len(spectrum)),))


def _bernstein_to_monomial(values: Sequence[Fraction], a: Fraction, b: Fraction) -> Polynomial:
    """Exact monomial form of sum_j v_j C(k,j) t^j (1-t)^(k-j), t = (z-a)/(b-a)."""
    k = len(values) - 1
    coeff_t = [Fraction(0)] * (k + 1)
    for j, v in enumerate(values):
        if v == 0:
            continue
        cj = comb(k, j)
        for m in range(j, k + 1):
            term = v * cj * comb(k - j, m - j)
            coeff_t[m] += -term if (m - j) % 2 else term
    width = b - a
    return Polynomial(tuple(coeff_t)).compose_affine(-a / width, 1 / width)


def _zero_pin(f, degree: int) -> Polynomial:
    """Degree <= `degree` polynomial equal to 1 at the origin, vanishing at the
    notch anchors, and localized at the Bernstein node nearest the origin.

    Subtracting (raw value at the origin) times this pin forces an exact root
    at the origin without disturbing the plateau: a global constant shift
    would be size O(1) whenever the dip sits below the Bernstein resolution.
    """
    width = f.b - f.a
    ell = Polynomial.constant(1)
    for g in getattr(f, "anchors", ()):
        ell = ell * Polynomial((Fraction(1), -1 / as_fraction(g)))
    m = max(degree - len(f.anchors), 0)
    t0 = -f.a / width
    j0 = min(max(int(round(t0 * m)), 0), m)
    bump_t = [Fraction(0)] * (m + 1)
    cj = comb(m, j0)
    for s in range(m - j0 + 1):
        term = cj * comb(m - j0, s)
        bump_t[j0 + s] = -term if s % 2 else term
    bump = Polynomial(tuple(bump_t)).compose_affine(-f.a / width, 1 / width)
    pin = bump * ell
    scale = pin(Fraction(0))
    if scale == 0:
        raise InternalConsistencyError("origin pin degenerated to zero at the origin")
    return pin * (1 / scale)


def approximate_with_derivative(f, degree: int) -> Polynomial:
    """Bernstein approximant of f on [f.a, f.b] with an exact root at 0.

    Converges to f together with its first derivative as the degree grows.
    `f` is normally a NotchFunction; any object with fields a, b and an exact
    `value` method works (plumbing self-tests feed plain monomials).  The
    root at the origin is enforced with the localized pin from `_zero_pin`;
    when the origin is an interval endpoint the raw Bernstein polynomial
    already interpolates f(0) = 0 and no pin is needed.
    """
    if degree < 2:
        raise ValueError("degree must be at least 2")
    width = f.b - f.a
    nodes = [f.a + width * Fraction(j, degree) for j in range(degree + 1)]
    raw = _bernstein_to_monomial([f.value(x) for x in nodes], f.a, f.b)
    at_zero = raw(Fraction(0))
    if at_zero == 0:
        return raw
    return raw - at_zero * _zero_pin(f, degree)


def _bernstein_controls(p: Polynomial, a, b) -> list[Fraction]:
    """Exact Bernstein control points of p on [a, b]."""
    a, b = as_fraction(a), as_fraction(b)
    if not p.coefficients:
        return [Fraction(0)]
    g = p.compose_affine(a, b - a)
    d = p.degree
    c = list(g.coefficients) + [Fraction(0)] * (d + 1 - len(g.coefficients))
    ctrl = []
    for i in range(d + 1):
        ctrl.append(sum(Fraction(comb(i, m), comb(d, m)) * c[m] for m in range(i + 1)))
    return ctrl


def evaluate_on_grid(p: Polynomial, a, b, num: int) -> np.ndarray:
    """Numerically stable dense evaluation: exact Bernstein form, then a
    vectorized float de Casteljau sweep over a uniform grid (endpoints included)."""
    ctrl = np.array([float(c) for c in _bernstein_controls(p, a, b)])
    t = np.linspace(0.0, 1.0, num)
    beta = np.repeat(ctrl[:, None], num, axis=1)
    for _ in range(len(ctrl) - 1):
        beta = beta[:-1] * (1 - t) + beta[1:] * t
    return beta[0]


Domain = Union[SpectrumSequence, tuple]


def sup_norm(f, domain: Domain, *, grid: int = DEFAULT_GRID) -> float:
    """Supremum of |f| over a spectrum (its points plus the origin, exactly) or
    over an interval (a, b) sampled on a uniform grid of at least 1000 points."""
    if isinstance(domain, SpectrumSequence):
        pts = [Fraction(0)] + list(domain.values)
        if isinstance(f, (Polynomial, NotchFunction)):
            values = [f.value(z) if isinstance(f, NotchFunction) else f(z) for z in pts]
        else:
            values = [f(z) for z in pts]
        return max((abs(float(v)) for v in values), default=0.0)
    a, b = domain
    if grid < 1000:
        raise ValueError("grid resolution must be at least 1000 points")
    if isinstance(f, Polynomial):
        vals = evaluate_on_grid(f, a, b, grid)
    elif isinstance(f, NotchFunction):
        vals = f.value_array(np.linspace(float(a), float(b), grid))
    else:
        vals = np.asarray([f(z) for z in np.linspace(float(a), float(b), grid)], float)
    return float(np.max(np.abs(vals))) if len(vals) else 0.0


def divide_shifted(p: Polynomial, lam) -> Polynomial:
    """The polynomial q with lam*p(lam) - (lam - z)*p(lam - z) = z*q(z).

    The left side vanishes identically at z = 0, so exact division by z is
    remainder-free; a nonzero remainder is an internal inconsistency.
    """
    lam = as_fraction(lam)
    reflected = p.compose_affine(lam, Fraction(-1))
    numerator = Polynomial.constant(lam * p(lam)) - Polynomial((lam, Fraction(-1))) * reflected
    return numerator.divided_by_z()


class MvtCheck(NamedTuple):
    ok: bool
    lhs: float
    rhs: float


def mvt_bound_check(p: Polynomial, q: Polynomial, lam, spectrum: SpectrumSequence, *,
                    tol: float = 1e-12, grid: int = DEFAULT_GRID) -> MvtCheck:
    """Mean-value bound for the divided polynomial: the sup of |q| over the
    spectrum (plus origin) must not exceed sup|p| + lam * sup|p'| over
    [lam - lambda_1, lam].  Returns the verdict with both sides."""
    lam = as_fraction(lam)
    a, b = lam - spectrum.lam(1), lam
    lhs = sup_norm(q, spectrum)
    rhs = sup_norm(p, (a, b), grid=grid) + float(lam) * sup_norm(p.derivative(), (a, b), grid=grid)
    return MvtCheck(lhs <= rhs + tol, lhs, rhs)
