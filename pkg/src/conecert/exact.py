"""Exact rational arithmetic and rigorous interval enclosures.

This module is the numerical foundation of the package.  Every quantity that
feeds a certification verdict is represented either as an exact
:class:`fractions.Fraction` or as an :class:`Interval` with exact rational
endpoints that provably contains the true real value.  Transcendental
functions (cos, arccos, pi) are evaluated through mpmath's interval context
with directed rounding, then converted back to rational endpoints, so no
step of the pipeline silently rounds toward the wrong side.

Angles are carried in degrees through :class:`AngleDeg`.  Cosines of the
handful of angles with rational cosine (0, 60, 90, 120, 180 degrees) are
returned exactly; everything else gets a thin certified enclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath as mp
import mpmath.libmp as libmp
from mpmath.libmp import libmpf

__all__ = [
    "Rational",
    "RationalLike",
    "Interval",
    "SurdValue",
    "AngleDeg",
    "QuadraticRoot",
    "DegenerateQuadraticError",
    "SingularAngleError",
    "to_fraction",
    "sqrt_fraction_enclosure",
    "pi_interval",
    "acos_interval",
    "cos_interval",
    "quadratic_real_roots",
    "threshold_to_cos_squared",
    "angle_range_from_threshold",
    "cos2_over_sin4",
]

Rational = Fraction
RationalLike = Union[Fraction, int, str]

# Working precision (bits) of the mpmath interval kernel.  160+ bits keeps
# enclosure widths near 1e-48, far below every tolerance used downstream.
_IV_PREC = 192

# Scale used for rational square-root enclosures: endpoints are correct to
# about 40 decimal digits.
_SQRT_SCALE = 10 ** 40

# Angles (in degrees) whose cosine is rational, and that cosine.
_SPECIAL_COS = {
    Fraction(0): Fraction(1),
    Fraction(60): Fraction(1, 2),
    Fraction(90): Fraction(0),
    Fraction(120): Fraction(-1, 2),
    Fraction(180): Fraction(-1),
}


class DegenerateQuadraticError(ValueError):
    """Raised when a quadratic solver receives a zero leading coefficient."""


class SingularAngleError(ValueError):
    """Raised when an angle-dependent quantity is evaluated at a pole."""


def to_fraction(value: RationalLike) -> Fraction:
    """Convert an int, Fraction, or ``"num/den"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _fraction_from_mpf_tuple(t) -> Fraction:
    """Exact value of a raw mpmath float tuple ``(sign, man, exp, bc)``.

    The mantissa may be a ``gmpy2.mpz`` when the gmpy backend is active, so
    everything is funnelled through ``int`` before touching ``Fraction``.
    """
    sign, man, exp, _ = t
    man = int(man)
    exp = int(exp)
    if man == 0:
        return Fraction(0)
    value = Fraction(man) * (Fraction(2) ** exp)
    return -value if sign else value


def _fraction_to_mpf(x: Fraction, rounding: str):
    """Directed-rounding conversion of a Fraction to a raw mpf tuple."""
    return libmpf.from_rational(x.numerator, x.denominator, _IV_PREC, rounding)


def sqrt_fraction_enclosure(x: Fraction, scale: int = _SQRT_SCALE) -> "Interval":
    """Certified enclosure of sqrt(x) for rational x >= 0.

    Uses integer square roots of the scaled numerator/denominator, so both
    endpoints are exact rationals and the enclosure is exact whenever the
    scaled radicand is a perfect square (in particular for x = (a/b)^2 with
    b dividing the scale).
    """
    if x < 0:
        raise ValueError(f"square root of a negative rational: {x}")
    if x == 0:
        return Interval(Fraction(0), Fraction(0))
    n2 = x.numerator * scale * scale
    d = x.denominator
    # floor(sqrt(n2 / d)) needs care: isqrt(n2 // d) can overshoot only when
    # division truncates, so bracket with explicit checks.
    lo_int = math.isqrt(n2 // d)
    while Fraction(lo_int * lo_int, 1) > Fraction(n2, d):
        lo_int -= 1
    hi_int = lo_int
    while Fraction(hi_int * hi_int, 1) < Fraction(n2, d):
        hi_int += 1
    return Interval(Fraction(lo_int, scale), Fraction(hi_int, scale))


@dataclass(frozen=True)
class Interval:
    """Closed interval with exact rational endpoints.

    All arithmetic is exact (rational endpoints never need outward
    rounding); only the transcendental constructors round, and they round
    outward.  The interval is a certificate: the represented real number is
    guaranteed to lie inside ``[lo, hi]``.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.lo, Fraction) or not isinstance(self.hi, Fraction):
            object.__setattr__(self, "lo", to_fraction(self.lo))
            object.__setattr__(self, "hi", to_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    # -- constructors ------------------------------------------------------

    @classmethod
    def point(cls, x: RationalLike) -> "Interval":
        x = to_fraction(x)
        return cls(x, x)

    @classmethod
    def hull(cls, items: Iterable["Interval"]) -> "Interval":
        items = list(items)
        if not items:
            raise ValueError("hull of no intervals")
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    @classmethod
    def from_ivmpf(cls, x) -> "Interval":
        """Exact endpoints of an mpmath interval number."""
        lo_t, hi_t = x._mpi_
        return cls(_fraction_from_mpf_tuple(lo_t), _fraction_from_mpf_tuple(hi_t))

    def to_ivmpf(self):
        """This interval as an mpmath interval number (outward-rounded)."""
        old = mp.iv.prec
        mp.iv.prec = _IV_PREC
        try:
            lo = mp.iv.mpf(self.lo.numerator) / self.lo.denominator
            hi = mp.iv.mpf(self.hi.numerator) / self.hi.denominator
            return mp.iv.mpf([lo.a, hi.b])
        finally:
            mp.iv.prec = old

    # -- basic queries -----------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: RationalLike) -> bool:
        x = to_fraction(x) if not isinstance(x, float) else x
        return self.lo <= x <= self.hi

    def contains_float(self, x: float) -> bool:
        return float(self.lo) <= x <= float(self.hi)

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __float__(self) -> float:
        return float(self.mid)

    def __str__(self) -> str:
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"

    # -- exact arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.point(to_fraction(other))

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError(f"division by interval containing zero: {o}")
        inv = Interval(Fraction(1) / o.hi, Fraction(1) / o.lo)
        return self * inv

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other) / self

    def square(self) -> "Interval":
        """Tight enclosure of x^2 (handles intervals straddling zero)."""
        if self.lo >= 0:
            return Interval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return Interval(self.hi * self.hi, self.lo * self.lo)
        return Interval(Fraction(0), max(self.lo * self.lo, self.hi * self.hi))

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi))

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise ValueError(f"sqrt of interval with negative part: {self}")
        lo_enc = sqrt_fraction_enclosure(self.lo)
        hi_enc = sqrt_fraction_enclosure(self.hi)
        return Interval(lo_enc.lo, hi_enc.hi)

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise ValueError(f"empty intersection of {self} and {other}")
        return Interval(lo, hi)

    def clamp(self, lo: Fraction, hi: Fraction) -> "Interval":
        return Interval(min(max(self.lo, lo), hi), min(max(self.hi, lo), hi))


@dataclass(frozen=True)
class SurdValue:
    """Exact value of the form ``coeff * sqrt(radicand)``.

    ``radicand`` is a non-negative integer; ``coeff`` a rational.  This is
    the exact carrier for square roots of rationals, e.g. certified stability
    constants p_n where p_n^2 is rational but p_n is not.
    """

    coeff: Fraction
    radicand: int

    def __post_init__(self) -> None:
        if not isinstance(self.coeff, Fraction):
            object.__setattr__(self, "coeff", to_fraction(self.coeff))
        if self.radicand < 0:
            raise ValueError("radicand must be non-negative")

    @classmethod
    def from_square(cls, square: Fraction) -> "SurdValue":
        """The non-negative value v with v^2 == square, in reduced surd form.

        The square part of numerator and denominator is pulled into the
        rational coefficient, so the radicand is squarefree.
        """
        square = to_fraction(square)
        if square < 0:
            raise ValueError("cannot take a real square root of a negative rational")
        if square == 0:
            return cls(Fraction(0), 0)
        import sympy

        def split(n: int) -> tuple[int, int]:
            # factorint may return gmpy2 integers; coerce so downstream
            # Fraction arithmetic stays in stdlib types.
            s, f = 1, 1
            for prime, mult in sympy.factorint(n).items():
                prime, mult = int(prime), int(mult)
                s *= prime ** (mult // 2)
                f *= prime ** (mult % 2)
            return s, f

        s, p_free = split(square.numerator)
        t, q_free = split(square.denominator)
        coeff = Fraction(s, t * q_free)
        radicand = p_free * q_free
        return cls(coeff, radicand)

    def square(self) -> Fraction:
        return self.coeff * self.coeff * self.radicand

    def to_interval(self) -> Interval:
        return sqrt_fraction_enclosure(Fraction(self.radicand)) * self.coeff

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self) -> str:
        if self.radicand in (0, 1):
            return str(self.coeff * (self.radicand and 1))
        return f"{self.coeff}*sqrt({self.radicand})"


# ---------------------------------------------------------------------------
# Transcendental kernel: pi, cos, arccos with certified directed rounding.
# ---------------------------------------------------------------------------


def pi_interval() -> Interval:
    """Certified rational enclosure of pi."""
    lo = _fraction_from_mpf_tuple(libmp.mpf_pi(_IV_PREC, "f"))
    hi = _fraction_from_mpf_tuple(libmp.mpf_pi(_IV_PREC, "c"))
    return Interval(lo, hi)


_PI = pi_interval()
_DEG_TO_RAD = _PI / 180          # interval enclosing pi/180
_RAD_TO_DEG = Interval.point(180) / _PI


def cos_interval(radians: Interval) -> Interval:
    """Certified enclosure of cos over an interval of radians."""
    old = mp.iv.prec
    mp.iv.prec = _IV_PREC
    try:
        result = mp.iv.cos(radians.to_ivmpf())
    finally:
        mp.iv.prec = old
    return Interval.from_ivmpf(result).clamp(Fraction(-1), Fraction(1))


def sin_interval(radians: Interval) -> Interval:
    old = mp.iv.prec
    mp.iv.prec = _IV_PREC
    try:
        result = mp.iv.sin(radians.to_ivmpf())
    finally:
        mp.iv.prec = old
    return Interval.from_ivmpf(result).clamp(Fraction(-1), Fraction(1))


def _acos_directed(x: Fraction, rounding: str) -> Fraction:
    """acos(x) rounded strictly down ('f') or up ('c').

    Evaluates at high working precision and pads by 2^(6 - prec), which
    dominates the final rounding error of mpmath's acos.
    """
    x = max(Fraction(-1), min(Fraction(1), x))
    with mp.workprec(_IV_PREC):
        approx = mp.acos(mp.mpf(x.numerator) / x.denominator)
        pad = Fraction(1, 2 ** (_IV_PREC - 6))
        value = _fraction_from_mpf_tuple(approx._mpf_)
    if rounding == "f":
        return max(Fraction(0), value - pad)
    return value + pad


def acos_interval(x: Interval) -> Interval:
    """Certified enclosure of arccos over an interval, in radians.

    arccos is monotone decreasing, so the image of [lo, hi] is
    [arccos(hi), arccos(lo)]; each endpoint is rounded outward.
    """
    if x.hi < -1 or x.lo > 1:
        raise ValueError(f"arccos argument outside [-1, 1]: {x}")
    clamped = x.clamp(Fraction(-1), Fraction(1))
    lo = _acos_directed(clamped.hi, "f")
    hi = _acos_directed(clamped.lo, "c")
    return Interval(lo, min(hi, _PI.hi))


@dataclass(frozen=True)
class AngleDeg:
    """An angle in degrees, carried as a certified enclosure.

    ``value`` is an :class:`Interval` of degrees inside [0, 180].  Exact
    rational angles are point intervals.  ``cos`` and ``sin`` return
    certified enclosures, exact at the special angles 0, 60, 90, 120, 180.
    """

    value: Interval

    def __post_init__(self) -> None:
        if not isinstance(self.value, Interval):
            object.__setattr__(self, "value", Interval.point(to_fraction(self.value)))
        if self.value.lo < 0 or self.value.hi > 180:
            raise ValueError(f"angle out of [0, 180] degrees: {self.value}")

    @classmethod
    def from_degrees(cls, degrees: RationalLike) -> "AngleDeg":
        return cls(Interval.point(to_fraction(degrees)))

    @property
    def is_point(self) -> bool:
        return self.value.lo == self.value.hi

    def radians(self) -> Interval:
        return self.value * _DEG_TO_RAD

    def cos(self) -> Interval:
        if self.is_point and self.value.lo in _SPECIAL_COS:
            return Interval.point(_SPECIAL_COS[self.value.lo])
        return cos_interval(self.radians())

    def sin_squared(self) -> Interval:
        """Enclosure of sin^2 via 1 - cos^2 (keeps special angles exact)."""
        return (Interval.point(1) - self.cos().square()).clamp(Fraction(0), Fraction(1))

    def sin(self) -> Interval:
        if self.is_point and self.value.lo in _SPECIAL_COS:
            return self.sin_squared().sqrt()
        return sin_interval(self.radians())

    def supplement(self) -> "AngleDeg":
        return AngleDeg(Interval(180 - self.value.hi, 180 - self.value.lo))

    def __float__(self) -> float:
        return float(self.value.mid)

    def __str__(self) -> str:
        if self.is_point:
            return f"{float(self)}°"
        return f"[{float(self.value.lo):.6f}°, {float(self.value.hi):.6f}°]"


# ---------------------------------------------------------------------------
# Quadratics with exact coefficients.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticRoot:
    """A real root of a quadratic: a certified enclosure plus exactness flag.

    ``exact`` is True when the discriminant is a perfect square, in which
    case the enclosure is a rational point interval.
    """

    interval: Interval
    exact: bool

    def __float__(self) -> float:
        return float(self.interval)


def _rational_perfect_square_root(x: Fraction) -> Fraction | None:
    """sqrt(x) if x is the square of a rational, else None."""
    if x < 0:
        return None
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def quadratic_real_roots(
    a: RationalLike,
    b: RationalLike,
    c: RationalLike,
    tol: RationalLike = Fraction(1, 10 ** 12),
) -> list[QuadraticRoot]:
    """Real roots of a x^2 + b x + c with exact rational coefficients.

    Returns 0, 1, or 2 roots in ascending order.  Each root carries a
    certified enclosure of width at most ``tol``; when the discriminant is a
    perfect square the root is an exact rational point flagged ``exact``.
    A zero leading coefficient raises :class:`DegenerateQuadraticError`.
    """
    a, b, c = to_fraction(a), to_fraction(b), to_fraction(c)
    tol = to_fraction(tol)
    if a == 0:
        raise DegenerateQuadraticError("leading coefficient is zero")
    if tol <= 0:
        raise ValueError("tolerance must be positive")

    disc = b * b - 4 * a * c
    if disc < 0:
        return []

    if disc == 0:
        root = -b / (2 * a)
        return [QuadraticRoot(Interval.point(root), True)]

    sqrt_disc = _rational_perfect_square_root(disc)
    if sqrt_disc is not None:
        r1 = (-b - sqrt_disc) / (2 * a)
        r2 = (-b + sqrt_disc) / (2 * a)
        roots = sorted((r1, r2))
        return [QuadraticRoot(Interval.point(r), True) for r in roots]

    scale = _SQRT_SCALE
    spread = abs(Fraction(1, 2 * a))
    enc = sqrt_fraction_enclosure(disc, scale)
    while enc.width * spread * 2 > tol:
        scale *= 10 ** 10
        enc = sqrt_fraction_enclosure(disc, scale)
    r1 = (Interval.point(-b) - enc) / (2 * a)
    r2 = (Interval.point(-b) + enc) / (2 * a)
    roots = sorted((r1, r2), key=lambda iv: iv.lo)
    return [QuadraticRoot(r, False) for r in roots]


# ---------------------------------------------------------------------------
# Threshold <-> angle conversions.
# ---------------------------------------------------------------------------


def threshold_to_cos_squared(
    threshold: RationalLike,
    tol: RationalLike = Fraction(1, 10 ** 12),
) -> Interval:
    """Solve cos^2(theta) / sin^4(theta) = T for u = cos^2(theta) in (0, 1).

    Writing u = cos^2, the equation becomes T (1-u)^2 = u, i.e.
    h(u) = T u^2 - (2T + 1) u + T = 0, which has exactly one root in (0, 1)
    (h(0) = T > 0, h(1) = -1 < 0, and h is strictly decreasing on [0, 1]).
    Pure rational bisection; returns an enclosure of width <= tol.
    """
    T = to_fraction(threshold)
    tol = to_fraction(tol)
    if T <= 0:
        raise ValueError("threshold must be positive")
    if tol <= 0:
        raise ValueError("tolerance must be positive")

    def h(u: Fraction) -> Fraction:
        return T * u * u - (2 * T + 1) * u + T

    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def _ceil_to_grid(x: Fraction, step: Fraction) -> Fraction:
    """Least multiple of step that is >= x."""
    return Fraction(int(-((-x) // step))) * step


def angle_range_from_threshold(
    threshold: RationalLike,
    tol_deg: RationalLike = Fraction(1, 1000),
) -> tuple[AngleDeg, AngleDeg]:
    """Certified enclosures of the angle window endpoints for a threshold T.

    The window is (theta_min, theta_max) with theta_max = 180 - theta_min
    and cos^2(theta_min)/sin^4(theta_min) = T, theta_min in (0, 90).  The
    upper endpoint of the theta_min enclosure is rounded up to the reporting
    grid of spacing ``tol_deg`` (and clamped so the enclosure width stays
    <= tol_deg); theta_max mirrors it exactly.  This matches the convention
    of quoting an inward-rounded window: the certified window
    [theta_min.hi, theta_max.lo] is contained in the true one.
    """
    tol_deg = to_fraction(tol_deg)
    if tol_deg <= 0:
        raise ValueError("tol_deg must be positive")
    u = threshold_to_cos_squared(threshold, tol=Fraction(1, 10 ** 12))
    cos_enc = u.sqrt()  # theta_min < 90 degrees, so cos(theta_min) = +sqrt(u)
    rad = acos_interval(cos_enc)
    deg = rad * _RAD_TO_DEG
    grid_hi = _ceil_to_grid(deg.hi, tol_deg)
    if grid_hi - deg.lo > tol_deg:
        grid_hi = deg.lo + tol_deg
    theta_min = AngleDeg(Interval(deg.lo, grid_hi))
    theta_max = AngleDeg(Interval(180 - grid_hi, 180 - deg.lo))
    return theta_min, theta_max


def cos2_over_sin4(theta: AngleDeg) -> Interval:
    """Certified enclosure of cos^2(theta) / sin^4(theta).

    Exact at special angles (e.g. exactly [0, 0] at 90 degrees).  Raises
    :class:`SingularAngleError` when the angle enclosure touches 0 or 180
    degrees, where the quantity blows up.
    """
    if theta.value.contains(Fraction(0)) or theta.value.contains(Fraction(180)):
        raise SingularAngleError(f"cos^2/sin^4 is singular at {theta}")
    c2 = theta.cos().square()
    s2 = theta.sin_squared()
    if s2.lo <= 0:
        raise SingularAngleError(f"angle enclosure too close to a pole: {theta}")
    return c2 / s2.square()
