"""Subdiagonal Pade approximants of the exponential and their error bounds.

The approximant of order n is r_n = P_n / Q_n with deg P_n = n and
deg Q_n = n + 1, normalized by P_n(0) = Q_n(0) = 1, matching e^z to order
2n + 2 at the origin.  Coefficients are kept as exact big-integer rationals;
floating point enters only when a polynomial is evaluated.

Besides construction and evaluation, this module provides the closed-form
constants of the convergence theory (sup bound on the closed right
half-plane, the constant C(alpha), L2 bounds on the imaginary axis) together
with numerical counterparts used to verify them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .errors import ConvergenceFailure, DomainError, PoleProximity
from .quadrature import adaptive_quad, decaying_tail_quad, legendre_nodes

DEFAULT_POLE_THRESHOLD = 1e-13


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with exact rational coefficients, index j = coefficient of z^j."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise DomainError("a polynomial needs at least one coefficient")
        if self.coeffs[-1] == 0 and len(self.coeffs) > 1:
            raise DomainError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self) -> "RationalPolynomial":
        if self.degree == 0:
            return RationalPolynomial((Fraction(0),))
        return RationalPolynomial(tuple(j * c for j, c in enumerate(self.coeffs) if j > 0))

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])


@dataclass(frozen=True)
class PadePair:
    """Numerator P_n (degree n) and denominator Q_n (degree n+1) of r_n."""

    n: int
    p: RationalPolynomial
    q: RationalPolynomial

    def __post_init__(self):
        if self.p.degree != self.n or self.q.degree != self.n + 1:
            raise DomainError("degree mismatch for order-n pair")
        if self.p.coeffs[0] != 1 or self.q.coeffs[0] != 1:
            raise DomainError("P(0) and Q(0) must equal 1 exactly")


@dataclass(frozen=True)
class BoundConstants:
    """Closed-form constants attached to a smoothness order alpha."""

    alpha: float
    c_alpha: float
    l2_bound: float
    l2_deriv_bound: float


@lru_cache(maxsize=None)
def pade_coefficients(n: int) -> PadePair:
    """Exact coefficients of P_n and Q_n.

    P_n coefficient j is (2n+1-j)! n! / ((2n+1)! j! (n-j)!) and Q_n
    coefficient j is (-1)^j (2n+1-j)! (n+1)! / ((2n+1)! j! (n+1-j)!),
    built by multiplicative recurrence in exact rational arithmetic.
    """
    if n < 0:
        raise DomainError("order must be nonnegative")
    p = [Fraction(1)]
    for j in range(n):
        p.append(p[-1] * Fraction(n - j, (2 * n + 1 - j) * (j + 1)))
    q = [Fraction(1)]
    for j in range(n + 1):
        q.append(q[-1] * Fraction(-(n + 1 - j), (2 * n + 1 - j) * (j + 1)))
    return PadePair(n, RationalPolynomial(tuple(p)), RationalPolynomial(tuple(q)))


def eval_poly(poly: RationalPolynomial, z, precision="double"):
    """Horner evaluation of an exact-rational polynomial.

    `precision` is either the tag "double" or a bit count; in the latter case
    the evaluation runs in mpmath at that precision and returns an mpmath
    number.  Rational coefficients are rounded to the evaluation precision at
    the last moment.
    """
    if precision == "double":
        acc = complex(0)
        for c in reversed(poly.coeffs):
            acc = acc * z + c.numerator / c.denominator
        return acc
    bits = int(precision)
    with mp.workprec(bits):
        zz = mp.mpc(z)
        acc = mp.mpc(0)
        for c in reversed(poly.coeffs):
            acc = acc * zz + mp.mpf(c.numerator) / mp.mpf(c.denominator)
        return acc


class PadeEvaluator:
    """Vectorized floating-point evaluation of one approximant family member.

    For |z| > 1 every ratio is computed from reversed-coefficient Horner
    forms, which avoids intermediate overflow on wide grids.  Error terms
    r_n(-z) - e^{-z} switch to the integral remainder representation whenever
    the predicted magnitude is too small for direct subtraction to carry
    relative accuracy.
    """

    #: predicted error-term magnitude below which the remainder integral is used
    SWITCH = 1e-7

    def __init__(self, pair: PadePair):
        self.pair = pair
        self.n = pair.n
        self.pf = pair.p.float_coeffs()
        self.qf = pair.q.float_coeffs()
        self.dpf = pair.p.derivative().float_coeffs()
        self.dqf = pair.q.derivative().float_coeffs()
        # log(n!/(2n+1)!) and its square, for overflow-free scale predictions
        self.log_gamma_ratio = math.lgamma(self.n + 1) - math.lgamma(2 * self.n + 2)
        self.gamma2 = math.exp(2 * self.log_gamma_ratio)
        self._pole_scale = None

    @property
    def pole_scale(self) -> float:
        """Rough magnitude of the largest denominator root (upper-end estimate)."""
        if self._pole_scale is None:
            with np.errstate(all="ignore"):
                roots = np.roots(self.qf[::-1])
            mags = np.abs(roots[np.isfinite(roots)])
            est = float(mags.max()) if mags.size else 0.0
            self._pole_scale = max(est, 2.5 * (self.n + 1))
        return self._pole_scale

    # -- polynomial pieces ------------------------------------------------

    def _ratio(self, num: np.ndarray, den: np.ndarray, degdiff: int, z: np.ndarray) -> np.ndarray:
        """num(z)/den(z); degdiff = deg(den) - deg(num)."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=complex)
        small = np.abs(z) <= 1.0
        if small.any():
            zs = z[small]
            out[small] = np.polyval(num[::-1], zs) / np.polyval(den[::-1], zs)
        if (~small).any():
            w = 1.0 / z[~small]
            out[~small] = (w ** degdiff) * np.polyval(num, w) / np.polyval(den, w)
        return out

    def q_value(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.polyval(self.qf[::-1], z)

    def q_abs(self, z) -> np.ndarray:
        """|Q_n(z)|, overflow-safe for large |z|."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=float)
        small = np.abs(z) <= 1.0
        if small.any():
            out[small] = np.abs(np.polyval(self.qf[::-1], z[small]))
        if (~small).any():
            zz = z[~small]
            w = 1.0 / zz
            out[~small] = np.exp(
                (self.n + 1) * np.log(np.abs(zz)) + np.log(np.abs(np.polyval(self.qf, w)))
            )
        return out

    def r(self, z) -> np.ndarray:
        """r_n(z) = P_n(z)/Q_n(z)."""
        return self._ratio(self.pf, self.qf, 1, z)

    def r_prime(self, z) -> np.ndarray:
        """r_n'(z) = P'/Q - (P/Q)(Q'/Q)."""
        a = self._ratio(self.dpf, self.qf, 2, z)
        b = self._ratio(self.pf, self.qf, 1, z)
        c = self._ratio(self.dqf, self.qf, 1, z)
        return a - b * c

    def q_log_ratio(self, z) -> np.ndarray:
        """Q_n'(z)/Q_n(z)."""
        return self._ratio(self.dqf, self.qf, 1, z)

    def _inv_q_scaled(self, z: np.ndarray, extra_log: np.ndarray) -> np.ndarray:
        """exp(extra_log)/Q_n(z) without overflowing intermediates."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=complex)
        small = np.abs(z) <= 1.0
        if small.any():
            out[small] = np.exp(extra_log[small]) / np.polyval(self.qf[::-1], z[small])
        if (~small).any():
            zz = z[~small]
            w = 1.0 / zz
            out[~small] = np.exp(extra_log[~small] - (self.n + 1) * np.log(zz)) / np.polyval(
                self.qf, w
            )
        return out

    # -- error terms -------------------------------------------------------

    def remainder_at_minus(self, z: np.ndarray, count: int = 160) -> np.ndarray:
        """r_n(-z) - e^{-z} through the integral remainder representation.

        Valid wherever Q_n(-z) != 0; accurate for any magnitude because the
        result is a product of individually accurate factors.
        """
        n = self.n
        z = np.asarray(z, dtype=complex)
        x, w = legendre_nodes(count)
        s = 0.5 * (x + 1.0)
        base = 0.5 * s ** n * (1 - s) ** (n + 1)
        integral = np.exp(np.multiply.outer(z, s - 1.0)) @ (w * base)
        lg = (2 * n + 2) * np.log(z) - math.lgamma(2 * n + 2)
        return (-1) ** n * self._inv_q_scaled(-z, lg) * integral

    def _remainder_deriv_tail(self, z: np.ndarray, count: int = 160) -> np.ndarray:
        """The extra integral term in the differentiated remainder (weight (1-s)^{n+2})."""
        n = self.n
        z = np.asarray(z, dtype=complex)
        x, w = legendre_nodes(count)
        s = 0.5 * (x + 1.0)
        base = 0.5 * s ** n * (1 - s) ** (n + 2)
        integral = np.exp(np.multiply.outer(z, s - 1.0)) @ (w * base)
        lg = (2 * n + 2) * np.log(z) - math.lgamma(2 * n + 2)
        return (-1) ** n * self._inv_q_scaled(-z, lg) * integral

    def error_term(self, z) -> np.ndarray:
        """r_n(-z) - e^{-z} for z in the closed right half-plane."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        with np.errstate(over="ignore"):
            predicted = 0.5 * self.gamma2 * np.abs(z) ** (2 * self.n + 2)
        tiny = predicted < self.SWITCH
        if (~tiny).any():
            zi = z[~tiny]
            out[~tiny] = self.r(-zi) - np.exp(-zi)
        if tiny.any():
            out[tiny] = self.remainder_at_minus(z[tiny])
        return out

    def error_term_derivative(self, z) -> np.ndarray:
        """r_n'(-z) - e^{-z} for z in the closed right half-plane.

        The small-|z| branch assembles the differentiated remainder from the
        base remainder plus the (1-s)-weighted integral, which keeps relative
        accuracy where direct subtraction would cancel to noise.
        """
        n = self.n
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        with np.errstate(over="ignore"):
            az = np.abs(z)
            predicted = self.gamma2 * (0.8 * az ** (2 * n + 2) + (n + 1) * az ** (2 * n + 1))
        tiny = predicted < self.SWITCH
        if (~tiny).any():
            zi = z[~tiny]
            out[~tiny] = self.r_prime(-zi) - np.exp(-zi)
        if tiny.any():
            zp = z[tiny]
            delta = self.remainder_at_minus(zp)
            out[tiny] = (
                -self.q_log_ratio(-zp) * delta
                - (2 * n + 2) / zp * delta
                + self._remainder_deriv_tail(zp)
            )
        return out


_EVALUATOR_CACHE: dict[int, PadeEvaluator] = {}


def evaluator(n: int) -> PadeEvaluator:
    """Shared evaluator instance for order n (immutable, safe to reuse)."""
    if n not in _EVALUATOR_CACHE:
        _EVALUATOR_CACHE[n] = PadeEvaluator(pade_coefficients(n))
    return _EVALUATOR_CACHE[n]


def eval_rn(n: int, z, precision="double", pole_threshold: float = DEFAULT_POLE_THRESHOLD):
    """r_n(z) = P_n(z)/Q_n(z) at a single point.

    Raises PoleProximity when |Q_n(z)| falls below `pole_threshold` times the
    largest coefficient magnitude (which is 1 for this family).
    """
    pair = pade_coefficients(n)
    if precision == "double":
        ev = evaluator(n)
        zz = np.array([z], dtype=complex)
        if ev.q_abs(zz)[0] < pole_threshold:
            raise PoleProximity(f"|Q_{n}({z})| below threshold {pole_threshold}")
        return complex(ev.r(zz)[0])
    bits = int(precision)
    qv = eval_poly(pair.q, z, bits)
    with mp.workprec(bits):
        if abs(qv) < pole_threshold:
            raise PoleProximity(f"|Q_{n}({z})| below threshold {pole_threshold}")
        return eval_poly(pair.p, z, bits) / qv


def perron_remainder(n: int, z, quad_points: int | None = None, tol: float = 1e-10,
                     pole_threshold: float = DEFAULT_POLE_THRESHOLD) -> complex:
    """r_n(z) - e^z via the integral remainder representation.

    The integral over [0, 1] is evaluated by Gauss-Legendre; when
    `quad_points` is None the node count doubles until two successive
    results agree to `tol` relative.  Serves as an independent oracle for
    direct subtraction.
    """
    ev = evaluator(n)
    z = complex(z)
    zz = np.array([z], dtype=complex)
    if ev.q_abs(zz)[0] < pole_threshold:
        raise PoleProximity(f"|Q_{n}({z})| below threshold {pole_threshold}")
    if z == 0:
        return 0.0 + 0.0j

    def integral(count: int) -> complex:
        x, w = legendre_nodes(count)
        s = 0.5 * (x + 1.0)
        vals = s ** n * (1 - s) ** (n + 1) * np.exp(-s * z)
        return complex(0.5 * np.sum(w * vals))

    if quad_points is not None:
        ival = integral(quad_points)
    else:
        prev = integral(32)
        count = 64
        while True:
            ival = integral(count)
            if abs(ival - prev) <= tol * max(abs(ival), 1e-300):
                break
            if count > (1 << 14):
                raise ConvergenceFailure("remainder quadrature did not converge")
            prev = ival
            count *= 2
    lg = z + (2 * n + 2) * cmath.log(z) - math.lgamma(2 * n + 2)
    prefactor = complex(ev._inv_q_scaled(zz, np.array([lg]))[0])
    return (-1) ** n * prefactor * ival


def modified_error(n: int, alpha: float, z) -> complex:
    """(r_n(-z) - e^{-z}) / z^alpha on the closed right half-plane, z != 0.

    z^alpha uses the principal branch; requires 0 < alpha < 2n + 2.
    """
    z = complex(z)
    if z == 0 or z.real < 0:
        raise DomainError("z must lie in the closed right half-plane and be nonzero")
    if not 0 < alpha < 2 * n + 2:
        raise DomainError("alpha must lie in (0, 2n+2)")
    ev = evaluator(n)
    delta = complex(ev.error_term(np.array([z]))[0])
    return delta / cmath.exp(alpha * cmath.log(z))


def sup_bound(n: int, alpha: float) -> float:
    """Sup of |(r_n(-z) - e^{-z})/z^alpha| over the closed right half-plane.

    Equals 2 (n!/(2n+1)!)^(alpha/(n+1)), evaluated through log-gamma to
    avoid factorial overflow.
    """
    if not 0 < alpha < 2 * n + 2:
        raise DomainError("alpha must lie in (0, 2n+2)")
    return 2.0 * math.exp(alpha / (n + 1) * (math.lgamma(n + 1) - math.lgamma(2 * n + 2)))


def c_alpha(alpha: float) -> float:
    """Error constant C(alpha) of the uniform convergence bound, alpha > 1/2."""
    if alpha <= 0.5:
        raise DomainError("alpha must exceed 1/2")
    inner = 8 * alpha / (2 * alpha + 1) ** 1.5 + (13 / 10) ** alpha * math.sqrt(
        5 ** (2 * alpha) / (6 * 13 ** (2 * alpha)) + 360 / (13 * (2 * alpha - 1))
    )
    return math.sqrt(2) / (2 * alpha - 1) ** 0.25 * math.sqrt(inner)


def l2_bounds(n: int, alpha: float) -> BoundConstants:
    """Closed-form L2 bounds on the imaginary axis for order n and 1/2 < alpha <= n + 1/2."""
    if not 0.5 < alpha <= n + 0.5:
        raise DomainError("alpha must lie in (1/2, n + 1/2]")
    decay = (n + 1.0) ** (-alpha + 0.5)
    l2 = 4 / math.sqrt(2 * alpha - 1) * decay
    deriv_coeff = 8 * alpha / (2 * alpha + 1) ** 1.5 + (13 / 10) ** alpha * math.sqrt(
        5 ** (2 * alpha) / (6 * 13 ** (2 * alpha)) + 360 / (13 * (2 * alpha - 1))
    )
    return BoundConstants(alpha, c_alpha(alpha), l2, deriv_coeff * decay)


def l2_norm_numeric(n: int, alpha: float, which: str = "function", tol: float = 1e-8) -> float:
    """Quadrature value of ||f(i.)||_L2(R) for f = (r_n(-z) - e^{-z})/z^alpha.

    `which` selects the function itself or the t-derivative of its
    imaginary-axis restriction.  By conjugate symmetry the integral is taken
    over t > 0 and doubled.  The range [0, T] is integrated directly; beyond
    T the modulus-one exponential part is integrated in closed form, the
    rational part by geometric chunks, and the oscillatory cross term along a
    rotated contour on which e^{it} decays (the rotation stays clear of all
    denominator roots because T exceeds their magnitude).
    """
    if which not in ("function", "derivative"):
        raise DomainError("which must be 'function' or 'derivative'")
    if not 0.5 < alpha <= n + 0.5:
        raise DomainError("alpha must lie in (1/2, n + 1/2]")
    ev = evaluator(n)
    t0 = max(24.0, 2.2 * ev.pole_scale + 10.0)

    if which == "function":
        def integrand(t):
            return np.abs(ev.error_term(1j * t)) ** 2 * t ** (-2 * alpha)
    else:
        def integrand(t):
            z = 1j * t
            num = ev.error_term_derivative(z) + (alpha / z) * ev.error_term(z)
            return np.abs(num) ** 2 * t ** (-2 * alpha)

    head = adaptive_quad(integrand, 1e-300, t0, tol / 4, initial_count=128)

    # tail of the |e^{-it}|^2-type part, in closed form
    tail = t0 ** (1 - 2 * alpha) / (2 * alpha - 1)
    if which == "function":
        def rational_part(t):
            return np.abs(ev.r(-1j * t)) ** 2 * t ** (-2 * alpha)

        def rotated_cross(s):
            tt = t0 + 1j * s
            return ev.r(-1j * tt) * tt ** (-2 * alpha) * np.exp(-s)
    else:
        tail += alpha ** 2 * t0 ** (-1 - 2 * alpha) / (2 * alpha + 1)

        def rational(tt):
            return ev.r_prime(-1j * tt) + alpha * ev.r(-1j * tt) / (1j * tt)

        def rational_part(t):
            return np.abs(rational(t)) ** 2 * t ** (-2 * alpha)

        def rotated_cross(s):
            tt = t0 + 1j * s
            return rational(tt) * (1 + 1j * alpha / tt) * tt ** (-2 * alpha) * np.exp(-s)

    abs_tol = tol * max(head + tail, 1e-12) / 8
    tail += decaying_tail_quad(rational_part, t0, tol / 8, abs_tol=abs_tol)
    cross = adaptive_quad(rotated_cross, 0.0, 60.0, tol / 8)
    tail += -2.0 * float(np.real(1j * np.exp(1j * t0) * cross))
    return math.sqrt(2.0 * (head + tail))
