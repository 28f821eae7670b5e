"""Cone-stability constants: the symmetric-function sup p_n, the threshold
functional, and per-dimension certification.

The central object is the 0-homogeneous symmetric function

    f_{m,q}(x) = (P3 + (1-q) P1 P2 - q P1^3) / (P2 + P1^2)^(3/2),

with P_k the k-th power sum of x in R^m.  Its supremum over the unit sphere
(the constant p whose square enters the threshold functional) is computed
two ways:

* exactly, by enumerating critical points — every critical point takes at
  most two distinct coordinate values, so candidates are the diagonal plus
  the real roots of an explicit quadratic for each split a + b = m
  (``sup_abs_f_two_value``), carried out in the field Q(sqrt(disc));
* approximately from below, by quasi-random sphere sampling plus projected
  gradient ascent (``brute_force_sup``), an independent oracle that must
  agree with the enumeration to 1e-8.

On top sit the exact threshold functional ``m_functional``, the parameter
constraint ``constraint_holds``, per-dimension certification combining both
with certified angle windows (``certify_dimension``), the contact-angle /
critical-dimension table (``n_theta_table``), a deterministic parameter
optimizer, and the angle-free n=3 exponent computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy import stats
from scipy.stats import qmc

from .exact import (
    Interval,
    QuadraticRoot,
    RationalLike,
    SurdValue,
    angle_range_from_threshold,
    quadratic_real_roots,
    sqrt_fraction_enclosure,
    to_fraction,
)
from .report import CertificationReport

__all__ = [
    "PowerSums",
    "TwoValuePoint",
    "ConeParams",
    "ConeParamsError",
    "QuadraticSurd",
    "SupResult",
    "BruteForceResult",
    "ConstraintReport",
    "NThetaRow",
    "NThetaTable",
    "OptimizeResult",
    "N3Report",
    "CALIBRATED_PARAMS",
    "calibrated_defaults",
    "f_value",
    "f_squared_signed",
    "zero_homogeneity_check",
    "critical_quadratic_coeffs",
    "two_value_critical_x",
    "sup_abs_f_two_value",
    "brute_force_sup",
    "m_functional",
    "constraint_holds",
    "certify_dimension",
    "n_theta_table",
    "optimize_params",
    "n3_coefficients",
]

ExactScalar = Union[Fraction, "QuadraticSurd"]


# ---------------------------------------------------------------------------
# Power sums and the function f.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerSums:
    """First three power sums of a vector; exact for rational inputs."""

    P1: Union[Fraction, float]
    P2: Union[Fraction, float]
    P3: Union[Fraction, float]

    def __post_init__(self) -> None:
        if isinstance(self.P2, Fraction):
            if self.P2 < 0:
                raise ValueError("P2 must be non-negative")
            if self.P2 == 0:
                raise ValueError("zero vector rejected (P2 = 0)")
        else:
            if self.P2 <= 0:
                raise ValueError("zero vector rejected (P2 <= 0)")

    @classmethod
    def from_vector(cls, x: Sequence) -> "PowerSums":
        if len(x) == 0:
            raise ValueError("empty vector")
        if all(isinstance(c, (int, Fraction)) for c in x):
            xs = [to_fraction(c) for c in x]
            return cls(
                sum(xs, Fraction(0)),
                sum((c * c for c in xs), Fraction(0)),
                sum((c * c * c for c in xs), Fraction(0)),
            )
        xf = [float(c) for c in x]
        return cls(
            math.fsum(xf),
            math.fsum(c * c for c in xf),
            math.fsum(c * c * c for c in xf),
        )


@dataclass(frozen=True)
class TwoValuePoint:
    """The vector with ``a`` copies of ``x`` followed by ``b`` copies of ``y``."""

    a: int
    b: int
    x: Union[Fraction, float]
    y: Union[Fraction, float]

    def __post_init__(self) -> None:
        if self.a < 1 or self.b < 1:
            raise ValueError("multiplicities must be positive")
        if self.x == 0 and self.y == 0:
            raise ValueError("(x, y) must not be (0, 0)")

    @property
    def m(self) -> int:
        return self.a + self.b

    def vector(self) -> list:
        return [self.x] * self.a + [self.y] * self.b


def f_value(x: Sequence, q: RationalLike) -> float:
    """f_{m,q}(x) = (P3 + (1-q) P1 P2 - q P1^3) / (P2 + P1^2)^(3/2)."""
    q = float(to_fraction(q))
    ps = PowerSums.from_vector(x)
    p1, p2, p3 = float(ps.P1), float(ps.P2), float(ps.P3)
    numerator = p3 + (1.0 - q) * p1 * p2 - q * p1 ** 3
    base = p2 + p1 * p1
    return numerator / base ** 1.5


def f_squared_signed(x: Sequence, q: RationalLike) -> tuple[int, Fraction]:
    """(sign of f, exact f^2) for a rational vector x.

    Avoids radicals entirely: the sign is the sign of the numerator N and
    the square N^2 / (P2 + P1^2)^3 is rational.
    """
    q = to_fraction(q)
    xs = [to_fraction(c) for c in x]
    ps = PowerSums.from_vector(xs)
    N = ps.P3 + (1 - q) * ps.P1 * ps.P2 - q * ps.P1 ** 3
    base = ps.P2 + ps.P1 ** 2
    sign = 0 if N == 0 else (1 if N > 0 else -1)
    return sign, N * N / base ** 3


def zero_homogeneity_check(x: Sequence, q: RationalLike, scale: float) -> float:
    """|f(scale * x) - f(x)|; must vanish since f is 0-homogeneous."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    scaled = [scale * float(c) for c in x]
    return abs(f_value(scaled, q) - f_value(x, q))


# ---------------------------------------------------------------------------
# Exact arithmetic in Q(sqrt(d)).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticSurd:
    """Exact number rational + coeff * sqrt(radicand).

    Arithmetic stays inside a single quadratic field: operands must share
    the radicand (or be rational).  Perfect-square radicands collapse to
    rationals at construction, so a nonzero ``coeff`` always multiplies a
    genuine irrationality, making signs and comparisons exactly decidable.
    """

    rational: Fraction
    coeff: Fraction = Fraction(0)
    radicand: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rational", to_fraction(self.rational))
        object.__setattr__(self, "coeff", to_fraction(self.coeff))
        if self.radicand < 0:
            raise ValueError("radicand must be non-negative")
        if self.coeff != 0 and self.radicand > 1:
            root = math.isqrt(self.radicand)
            if root * root == self.radicand:
                object.__setattr__(self, "rational", self.rational + self.coeff * root)
                object.__setattr__(self, "coeff", Fraction(0))
                object.__setattr__(self, "radicand", 0)
        if self.coeff == 0 or self.radicand in (0, 1):
            if self.radicand == 1:
                object.__setattr__(self, "rational", self.rational + self.coeff)
            object.__setattr__(self, "coeff", Fraction(0))
            object.__setattr__(self, "radicand", 0)

    # -- helpers -------------------------------------------------------

    @classmethod
    def from_rational(cls, x: RationalLike) -> "QuadraticSurd":
        return cls(to_fraction(x))

    @property
    def is_rational(self) -> bool:
        return self.coeff == 0

    def _common_radicand(self, other: "QuadraticSurd") -> int:
        if self.is_rational:
            return other.radicand
        if other.is_rational:
            return self.radicand
        if self.radicand != other.radicand:
            raise ValueError(
                f"mixed radicands {self.radicand} and {other.radicand}; "
                "use interval comparison instead"
            )
        return self.radicand

    @staticmethod
    def _coerce(value) -> "QuadraticSurd":
        if isinstance(value, QuadraticSurd):
            return value
        return QuadraticSurd(to_fraction(value))

    # -- field operations ------------------------------------------------

    def __add__(self, other) -> "QuadraticSurd":
        o = self._coerce(other)
        d = self._common_radicand(o)
        return QuadraticSurd(self.rational + o.rational, self.coeff + o.coeff, d)

    __radd__ = __add__

    def __neg__(self) -> "QuadraticSurd":
        return QuadraticSurd(-self.rational, -self.coeff, self.radicand)

    def __sub__(self, other) -> "QuadraticSurd":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "QuadraticSurd":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "QuadraticSurd":
        o = self._coerce(other)
        d = self._common_radicand(o)
        rational = self.rational * o.rational + self.coeff * o.coeff * d
        coeff = self.rational * o.coeff + self.coeff * o.rational
        return QuadraticSurd(rational, coeff, d)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QuadraticSurd":
        o = self._coerce(other)
        d = self._common_radicand(o)
        norm = o.rational * o.rational - o.coeff * o.coeff * d
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        conj = QuadraticSurd(o.rational, -o.coeff, d)
        product = self * conj
        return QuadraticSurd(product.rational / norm, product.coeff / norm, d)

    def __rtruediv__(self, other) -> "QuadraticSurd":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "QuadraticSurd":
        if exponent < 0:
            return QuadraticSurd.from_rational(1) / self ** (-exponent)
        result = QuadraticSurd.from_rational(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- exact sign and order ---------------------------------------------

    def sign(self) -> int:
        a, b, d = self.rational, self.coeff, self.radicand
        if b == 0:
            return 0 if a == 0 else (1 if a > 0 else -1)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # Opposite signs: compare a^2 against b^2 d exactly.
        lhs, rhs = a * a, b * b * d
        if lhs == rhs:
            return 0
        if a > 0:  # b < 0
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        try:
            return (self - o).sign() == 0
        except ValueError:
            return False

    def __hash__(self):
        return hash((self.rational, self.coeff, self.radicand))

    def __lt__(self, other) -> bool:
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other) -> bool:
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - self._coerce(other)).sign() >= 0

    def to_interval(self) -> Interval:
        iv = Interval.point(self.rational)
        if self.coeff != 0:
            iv = iv + sqrt_fraction_enclosure(Fraction(self.radicand)) * self.coeff
        return iv

    def __float__(self) -> float:
        return float(self.rational) + float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.rational)
        return f"{self.rational} + {self.coeff}*sqrt({self.radicand})"


def _compare_exact(u: ExactScalar, v: ExactScalar) -> int:
    """Total order on exact scalars; -1/0/+1 for u <,=,> v.

    Same-field and rational comparisons are exact; comparisons across
    distinct quadratic fields fall back to certified intervals, refined
    once, and treat a persistent overlap as a tie.
    """
    us = u if isinstance(u, QuadraticSurd) else QuadraticSurd.from_rational(u)
    vs = v if isinstance(v, QuadraticSurd) else QuadraticSurd.from_rational(v)
    try:
        return (us - vs).sign()
    except ValueError:
        pass
    for scale in (10 ** 40, 10 ** 80):
        iu = _surd_interval(us, scale)
        iv = _surd_interval(vs, scale)
        if iu.hi < iv.lo:
            return -1
        if iv.hi < iu.lo:
            return 1
    return 0


def _surd_interval(s: QuadraticSurd, scale: int) -> Interval:
    iv = Interval.point(s.rational)
    if s.coeff != 0:
        iv = iv + sqrt_fraction_enclosure(Fraction(s.radicand), scale) * s.coeff
    return iv


# ---------------------------------------------------------------------------
# Two-value enumeration.
# ---------------------------------------------------------------------------


def critical_quadratic_coeffs(a: int, b: int, q: RationalLike) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of the off-diagonal critical-point quadratic in x (y = 1).

    Critical points of f with a copies of x and b copies of y satisfy
    (away from the diagonal x = y)

        (2+q) a (a+1) x^2 + [3 (1 + a + b) + 2 (2+q) a b] x y
                          + (2+q) b (b+1) y^2 = 0.

    The middle coefficient groups the linear-in-multiplicity part as
    3(1 + a + b): this is forced by the cross-check that for
    (a, b, q) = (1, 2, 6/11) the quadratic must have the rational root
    x = -7/2 (giving the known maximizer direction (1, -2/7, -2/7)),
    which fails under the superficially similar grouping 3 + a + b.
    """
    if a < 1 or b < 1:
        raise ValueError("multiplicities must be positive")
    q = to_fraction(q)
    A = (2 + q) * a * (a + 1)
    B = 3 * (1 + a + b) + 2 * (2 + q) * a * b
    C = (2 + q) * b * (b + 1)
    return A, B, C


def two_value_critical_x(
    a: int,
    b: int,
    q: RationalLike,
    tol: RationalLike = Fraction(1, 10 ** 12),
) -> list[QuadraticRoot]:
    """Real critical values x (with y = 1) for the split (a, b); 0-2 roots."""
    A, B, C = critical_quadratic_coeffs(a, b, q)
    return quadratic_real_roots(A, B, C, tol)


def _critical_roots_exact(a: int, b: int, q: Fraction) -> list[QuadraticSurd]:
    """The real roots of the critical quadratic as exact field elements."""
    A, B, C = critical_quadratic_coeffs(a, b, q)
    disc = B * B - 4 * A * C
    if disc < 0:
        return []
    if disc == 0:
        return [QuadraticSurd.from_rational(-B / (2 * A))]
    root_n = math.isqrt(disc.numerator)
    root_d = math.isqrt(disc.denominator)
    if root_n * root_n == disc.numerator and root_d * root_d == disc.denominator:
        sqrt_disc = Fraction(root_n, root_d)
        return [
            QuadraticSurd.from_rational((-B - sqrt_disc) / (2 * A)),
            QuadraticSurd.from_rational((-B + sqrt_disc) / (2 * A)),
        ]
    # sqrt(p/q) = sqrt(p q) / q keeps the radicand integral.
    d = disc.numerator * disc.denominator
    half = Fraction(1, 2) / A
    base = -B * half
    spread = half / disc.denominator
    return [
        QuadraticSurd(base, -spread, d),
        QuadraticSurd(base, spread, d),
    ]


def _f_squared_exact(a: int, b: int, q: Fraction, x: QuadraticSurd) -> QuadraticSurd:
    """Exact f^2 at the point with a copies of x and b copies of 1."""
    one = QuadraticSurd.from_rational(1)
    P1 = x * a + one * b
    P2 = x * x * a + one * b
    P3 = x ** 3 * a + one * b
    N = P3 + P1 * P2 * (1 - q) - P1 ** 3 * q
    base = P2 + P1 * P1
    return (N * N) / base ** 3


@dataclass(frozen=True)
class SupResult:
    """Result of the exhaustive two-value sup computation.

    ``value`` is the sup of |f|: a :class:`SurdValue` (exact) when the
    maximizing f^2 is rational, otherwise a thin certified interval.
    ``f_squared`` is always exact.  ``witness`` is normalised: scaled so
    the largest-magnitude coordinate is 1 and sorted descending.
    """

    value: Union[SurdValue, Interval]
    f_squared: ExactScalar
    witness: TwoValuePoint
    witness_source: str
    exhaustive: bool
    candidates: tuple[dict, ...] = field(default_factory=tuple)

    def __float__(self) -> float:
        return float(self.value)


def _normalize_witness(a: int, b: int, x: ExactScalar) -> TwoValuePoint:
    """Canonical form of (x,...,x, 1,...,1): largest coordinate 1, sorted."""
    if isinstance(x, QuadraticSurd) and x.is_rational:
        x = x.rational
    if isinstance(x, Fraction):
        if abs(x) > 1:
            return TwoValuePoint(a=a, b=b, x=Fraction(1), y=1 / x)
        return TwoValuePoint(a=b, b=a, x=Fraction(1), y=x)
    xf = float(x)
    if abs(xf) > 1:
        inv = float(QuadraticSurd.from_rational(1) / x) if isinstance(x, QuadraticSurd) else 1 / xf
        return TwoValuePoint(a=a, b=b, x=1.0, y=inv)
    return TwoValuePoint(a=b, b=a, x=1.0, y=xf)


def sup_abs_f_two_value(m: int, q: RationalLike) -> SupResult:
    """Exact sup of |f_{m,q}| over all critical configurations.

    Enumerates, for every split a + b = m, the real roots of the critical
    quadratic (the two-value critical points), then the diagonal point
    (1,...,1) — the single-value case the quadratic excludes.  The champion
    is selected by exact comparison of f^2 values; ties keep the earliest
    candidate, so a root witness is preferred over an equal diagonal value.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    q = to_fraction(q)
    if q <= 0:
        raise ValueError("q must be positive")

    best_f2: Optional[ExactScalar] = None
    best_witness: Optional[TwoValuePoint] = None
    best_source = ""
    candidates: list[dict] = []

    for a in range(1, m):
        b = m - a
        for root in _critical_roots_exact(a, b, q):
            f2 = _f_squared_exact(a, b, q, root)
            f2_simple: ExactScalar = f2.rational if f2.is_rational else f2
            record = {
                "kind": "critical_root",
                "a": a,
                "b": b,
                "root": float(root),
                "root_exact": str(root),
                "f_abs": math.sqrt(max(float(f2_simple), 0.0)),
            }
            candidates.append(record)
            if best_f2 is None or _compare_exact(f2_simple, best_f2) > 0:
                best_f2 = f2_simple
                best_witness = _normalize_witness(a, b, root if not root.is_rational else root.rational)
                best_source = "critical_root"

    # Diagonal (single-value) candidate: x = (1, ..., 1).
    N = Fraction(m) + (1 - q) * m * m - q * m ** 3
    diag_f2 = N * N / Fraction(m + m * m) ** 3
    candidates.append(
        {
            "kind": "diagonal",
            "a": 1,
            "b": m - 1,
            "root": 1.0,
            "root_exact": "1",
            "f_abs": math.sqrt(float(diag_f2)),
        }
    )
    if best_f2 is None or _compare_exact(diag_f2, best_f2) > 0:
        best_f2 = diag_f2
        best_witness = TwoValuePoint(a=1, b=m - 1, x=Fraction(1), y=Fraction(1))
        best_source = "diagonal"

    assert best_f2 is not None and best_witness is not None
    if isinstance(best_f2, Fraction):
        value: Union[SurdValue, Interval] = SurdValue.from_square(best_f2)
    else:
        value = best_f2.to_interval().clamp(Fraction(0), best_f2.to_interval().hi).sqrt()
    return SupResult(
        value=value,
        f_squared=best_f2,
        witness=best_witness,
        witness_source=best_source,
        exhaustive=True,
        candidates=tuple(candidates),
    )


# ---------------------------------------------------------------------------
# Brute-force oracle.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BruteForceResult:
    """Best |f| found by quasi-random sampling plus gradient ascent."""

    value: float
    witness: tuple[float, ...]
    samples: int
    ascent_steps: int
    seed: int


def _f_and_gradient(x: np.ndarray, q: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised f values and Euclidean gradients for rows of x."""
    p1 = x.sum(axis=1)
    p2 = (x ** 2).sum(axis=1)
    p3 = (x ** 3).sum(axis=1)
    N = p3 + (1.0 - q) * p1 * p2 - q * p1 ** 3
    base = p2 + p1 ** 2
    f = N / base ** 1.5
    dN = 3.0 * x ** 2 + (1.0 - q) * (p2[:, None] + 2.0 * p1[:, None] * x) - 3.0 * q * p1[:, None] ** 2
    dbase = 2.0 * x + 2.0 * p1[:, None]
    grad = dN / base[:, None] ** 1.5 - 1.5 * N[:, None] * dbase / base[:, None] ** 2.5
    return f, grad


def brute_force_sup(
    m: int,
    q: RationalLike,
    samples: int = 100_000,
    ascent_steps: int = 200,
    seed: int = 42,
) -> BruteForceResult:
    """Lower-bound oracle for sup |f_{m,q}| on the unit sphere.

    Scrambled Sobol points are pushed through the Gaussian inverse CDF and
    normalised to the sphere; the best 512 starts are refined by projected
    gradient ascent on |f| with per-sample adaptive step sizes.  Fully
    deterministic for a fixed seed.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if samples < 10_000:
        raise ValueError("need at least 10^4 samples for a meaningful oracle")
    q = float(to_fraction(q))

    sobol = qmc.Sobol(d=m, scramble=True, seed=seed)
    bits = max(1, math.ceil(math.log2(samples)))
    u = sobol.random_base2(bits)[:samples]
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    g = stats.norm.ppf(u)
    norms = np.linalg.norm(g, axis=1)
    keep = norms > 1e-8
    x = g[keep] / norms[keep, None]

    f, _ = _f_and_gradient(x, q)
    order = np.argsort(-np.abs(f))
    top = x[order[:512]].copy()

    step = np.full(top.shape[0], 0.1)
    for _ in range(ascent_steps):
        vals, grads = _f_and_gradient(top, q)
        direction = np.sign(vals)[:, None] * grads
        tangential = direction - (direction * top).sum(axis=1)[:, None] * top
        proposal = top + step[:, None] * tangential
        proposal /= np.linalg.norm(proposal, axis=1)[:, None]
        new_vals, _ = _f_and_gradient(proposal, q)
        better = np.abs(new_vals) > np.abs(vals)
        top[better] = proposal[better]
        step[better] *= 1.3
        step[~better] *= 0.5

    final, _ = _f_and_gradient(top, q)
    best_idx = int(np.argmax(np.abs(final)))
    witness = np.sort(top[best_idx])[::-1]
    return BruteForceResult(
        value=float(np.abs(final[best_idx])),
        witness=tuple(float(c) for c in witness),
        samples=samples,
        ascent_steps=ascent_steps,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Parameters, threshold functional, constraint.
# ---------------------------------------------------------------------------


class ConeParamsError(ValueError):
    """Raised when a parameter set violates its admissibility invariants."""

    def __init__(self, message: str, payload: Optional[dict] = None):
        super().__init__(message)
        self.payload = payload or {}


@dataclass(frozen=True)
class ConeParams:
    """Certification parameters (n, alpha, delta, q, p^2).

    The invariant 2 alpha - 1 + 2/(n-1) - alpha^2 (q+1) > 0 (positivity of
    the threshold functional's numerator factor) is enforced at
    construction: an infeasible triple is rejected with the exact invariant
    value attached.
    """

    n: int
    alpha: Fraction
    delta: Fraction
    q: Fraction
    p_squared: Fraction

    def __post_init__(self) -> None:
        for name in ("alpha", "delta", "q", "p_squared"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.n < 3:
            raise ConeParamsError(f"n must be at least 3, got {self.n}")
        if not 0 < self.alpha <= 1:
            raise ConeParamsError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0 < self.delta < 1:
            raise ConeParamsError(f"delta must lie in (0, 1), got {self.delta}")
        if self.q <= 0:
            raise ConeParamsError(f"q must be positive, got {self.q}")
        if self.p_squared < 0:
            raise ConeParamsError(f"p_squared must be non-negative, got {self.p_squared}")
        inv = self.invariant_value
        if inv <= 0:
            raise ConeParamsError(
                f"infeasible parameters: 2a - 1 + 2/(n-1) - a^2 (q+1) = {inv} <= 0",
                payload={"invariant_value": inv},
            )

    @property
    def invariant_value(self) -> Fraction:
        return 2 * self.alpha - 1 + Fraction(2, self.n - 1) - self.alpha ** 2 * (self.q + 1)


CALIBRATED_PARAMS: dict[int, ConeParams] = {}


def _calibrated_params() -> dict[int, ConeParams]:
    if not CALIBRATED_PARAMS:
        CALIBRATED_PARAMS.update(
            {
                4: ConeParams(4, Fraction(14, 33), Fraction(1, 15), Fraction(1), Fraction(1, 6)),
                5: ConeParams(5, Fraction(7, 12), Fraction(4, 19), Fraction(6, 11), Fraction(4225, 7986)),
                6: ConeParams(
                    6,
                    Fraction(6, 11),
                    Fraction(16, 25),
                    Fraction(43, 391),
                    Fraction(646328929, 717317652),
                ),
            }
        )
    return CALIBRATED_PARAMS


def calibrated_defaults(n: int) -> ConeParams:
    """The calibrated parameter set for n in {4, 5, 6}."""
    params = _calibrated_params()
    if n not in params:
        raise ValueError(f"no default parameters for n = {n}; supply them explicitly")
    return params[n]


def m_functional(p: ConeParams) -> Fraction:
    """Exact threshold functional 4(1-d) q (2a - 1 + 2/(n-1) - a^2(q+1)) / ((2a+1)^2 p^2)."""
    if p.p_squared == 0:
        raise ZeroDivisionError(
            "p_squared = 0 (the three-dimensional case is handled by n3_coefficients, "
            "not the threshold functional)"
        )
    return (
        4 * (1 - p.delta) * p.q * p.invariant_value / ((2 * p.alpha + 1) ** 2 * p.p_squared)
    )


@dataclass(frozen=True)
class ConstraintReport:
    """Exact evaluation of the admissibility constraint lhs < rhs."""

    lhs: Fraction
    rhs: Fraction
    strict: bool

    @property
    def gap(self) -> Fraction:
        return self.rhs - self.lhs


def constraint_holds(p: ConeParams) -> ConstraintReport:
    """Exact check of the parameter constraint.

    lhs = [1 + q + 4(1-d)/((2a+1)^2 d) * (2a - 1 + 2/(n-1) - a^2(q+1))]
          * (1 + a - n/2)^2 - 2 (a(q+1) - 1)(1 + a - n/2)
    rhs = (2n - 4)/(n - 1), and the constraint is strict inequality.
    """
    shift = 1 + p.alpha - Fraction(p.n, 2)
    bracket = 1 + p.q + 4 * (1 - p.delta) / ((2 * p.alpha + 1) ** 2 * p.delta) * p.invariant_value
    lhs = bracket * shift ** 2 - 2 * (p.alpha * (p.q + 1) - 1) * shift
    rhs = Fraction(2 * p.n - 4, p.n - 1)
    return ConstraintReport(lhs=lhs, rhs=rhs, strict=lhs < rhs)


def certify_dimension(
    n: int,
    params: Optional[ConeParams] = None,
    tol_deg: RationalLike = Fraction(1, 1000),
) -> CertificationReport:
    """Certify the parameter set for dimension n in {4, 5, 6}.

    Checks, all exactly: the parameter invariant (already enforced by
    ConeParams), strictness of the constraint, the threshold functional
    value, and the comparison of p_squared against the exhaustive two-value
    sup for both variable counts m = n-2 and m = n-1 (the boundary estimate
    is ambiguous between them, so both verdicts are surfaced; m = n-2 is
    the one the parameter sets are calibrated to).  The certified angle
    window for the threshold is attached as enclosures.
    """
    if n not in (4, 5, 6):
        raise ValueError("certify_dimension handles n in {4, 5, 6}")
    p = params if params is not None else _calibrated_params()[n]
    if p.n != n:
        raise ValueError(f"params.n = {p.n} does not match n = {n}")
    tol_deg = to_fraction(tol_deg)

    claim = f"dimension n={n}: parameter set admissible with certified angle window"
    constraint = constraint_holds(p)
    if not constraint.strict:
        return CertificationReport(
            claim=claim,
            method="exact",
            verdict="falsified",
            payload={
                "reason": "constraint violated",
                "constraint_lhs": constraint.lhs,
                "constraint_rhs": constraint.rhs,
                "constraint_gap": constraint.gap,
            },
            provenance={"params": _params_payload(p)},
        )

    threshold = m_functional(p)
    theta_min, theta_max = angle_range_from_threshold(threshold, tol_deg)

    sup_entries = {}
    sup_ok = True
    for m in (n - 2, n - 1):
        sup = sup_abs_f_two_value(m, p.q)
        exceeds = _compare_exact(sup.f_squared, p.p_squared) > 0
        matches = _compare_exact(sup.f_squared, p.p_squared) == 0
        if m == n - 2 and exceeds:
            sup_ok = False
        sup_entries[f"m={m}"] = {
            "sup_f_squared": sup.f_squared if isinstance(sup.f_squared, Fraction) else str(sup.f_squared),
            "sup_f_squared_float": float(sup.f_squared) if isinstance(sup.f_squared, Fraction) else float(sup.value),
            "equals_p_squared": matches,
            "exceeds_p_squared": exceeds,
            "witness": _witness_payload(sup.witness),
        }

    verdict = "certified" if sup_ok else "falsified"
    return CertificationReport(
        claim=claim,
        method="interval",
        verdict=verdict,
        payload={
            "threshold": threshold,
            "invariant_value": p.invariant_value,
            "constraint_lhs": constraint.lhs,
            "constraint_rhs": constraint.rhs,
            "constraint_gap": constraint.gap,
            "theta_min_deg": theta_min.value,
            "theta_max_deg": theta_max.value,
            "p_squared": p.p_squared,
            "sup_comparisons": sup_entries,
        },
        provenance={"params": _params_payload(p), "tol_deg": tol_deg},
    )


def _params_payload(p: ConeParams) -> dict:
    return {
        "n": p.n,
        "alpha": p.alpha,
        "delta": p.delta,
        "q": p.q,
        "p_squared": p.p_squared,
    }


def _witness_payload(w: TwoValuePoint) -> dict:
    return {"a": w.a, "b": w.b, "x": w.x, "y": w.y}


# ---------------------------------------------------------------------------
# Contact-angle table.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NThetaRow:
    """One half-open row [lo, hi) of the critical-dimension table."""

    lo: Fraction
    hi: Fraction
    n_theta: int
    lo_enclosure: Interval
    hi_enclosure: Interval


@dataclass(frozen=True)
class NThetaTable:
    rows: tuple[NThetaRow, ...]
    tol_deg: Fraction

    def classify(self, theta_deg: RationalLike) -> int:
        """Critical dimension for a contact angle (degrees).

        The angle windows are symmetric about 90 degrees, so angles below
        90 are classified through their supplement.
        """
        theta = to_fraction(theta_deg)
        if not 0 < theta < 180:
            raise ValueError("theta must lie strictly between 0 and 180 degrees")
        if theta < 90:
            theta = 180 - theta
        for row in self.rows:
            if row.lo <= theta < row.hi:
                return row.n_theta
        raise ValueError(f"angle {theta} not covered by the table")

    def decimals(self) -> int:
        d = 0
        t = self.tol_deg
        while t < 1 and d < 12:
            t *= 10
            d += 1
        return d if self.tol_deg == Fraction(1, 10 ** d) else 6

    def formatted_rows(self) -> list[dict]:
        dec = self.decimals()
        out = []
        for row in self.rows:
            out.append(
                {
                    "theta_lo_deg": f"{float(row.lo):.{dec}f}",
                    "theta_hi_deg": f"{float(row.hi):.{dec}f}",
                    "n_theta": row.n_theta,
                }
            )
        return out


def n_theta_table(tol_deg: RationalLike = Fraction(1, 1000)) -> NThetaTable:
    """The critical-dimension table on [90, 180) degrees.

    The three certified thresholds give breakpoints near 94.58, 106.664 and
    128.346 degrees; each row boundary is the grid-rounded certified value
    (the true breakpoint lies inside the attached enclosure of width at
    most tol_deg).  n_theta = 7 on [90, b6), 6 on [b6, b5), 5 on [b5, b4),
    4 on [b4, 180).
    """
    tol_deg = to_fraction(tol_deg)
    breaks: dict[int, tuple[Fraction, Interval]] = {}
    for n in (4, 5, 6):
        threshold = m_functional(_calibrated_params()[n])
        _, theta_max = angle_range_from_threshold(threshold, tol_deg)
        breaks[n] = (theta_max.value.lo, theta_max.value)

    ninety = Interval.point(Fraction(90))
    one_eighty = Interval.point(Fraction(180))
    b6, enc6 = breaks[6]
    b5, enc5 = breaks[5]
    b4, enc4 = breaks[4]
    rows = (
        NThetaRow(Fraction(90), b6, 7, ninety, enc6),
        NThetaRow(b6, b5, 6, enc6, enc5),
        NThetaRow(b5, b4, 5, enc5, enc4),
        NThetaRow(b4, Fraction(180), 4, enc4, one_eighty),
    )
    return NThetaTable(rows=rows, tol_deg=tol_deg)


# ---------------------------------------------------------------------------
# Parameter optimization.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptimizeResult:
    """Outcome of the deterministic grid + refinement search."""

    best: Optional[ConeParams]
    best_m: Optional[Fraction]
    calibrated: Optional[ConeParams]
    default_m: Optional[Fraction]
    matches_or_improves_default: Optional[bool]
    evaluated: int
    feasible_count: int
    no_search: bool


# Feasibility margin keeping the optimizer away from the blow-up boundary
# of the threshold functional.
_FEASIBILITY_MARGIN = Fraction(1, 10 ** 6)


def _try_params(n: int, alpha: Fraction, delta: Fraction, q: Fraction, p_squared: Fraction):
    try:
        p = ConeParams(n, alpha, delta, q, p_squared)
    except ConeParamsError:
        return None
    if p.invariant_value <= _FEASIBILITY_MARGIN:
        return None
    if not constraint_holds(p).strict:
        return None
    return p


def optimize_params(
    n: int,
    p_squared: Optional[RationalLike] = None,
    budget: int = 0,
    seed: int = 42,
) -> OptimizeResult:
    """Search (alpha, delta, q) maximising the threshold functional.

    Deterministic coarse rational grid followed by local refinement around
    the incumbent; every candidate is screened by the exact feasibility
    tests (parameter invariant with a 1e-6 margin, strict constraint) and
    scored by the exact functional.  The known-good parameter set for n in
    {4, 5, 6} is always included as a candidate, so the result never falls
    below it.  ``budget`` caps the number of exact evaluations; zero budget
    performs no search and simply echoes the defaults.  ``seed`` is
    accepted for interface uniformity; the search is grid-based and
    deterministic regardless.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    calibrated = _calibrated_params().get(n)
    if p_squared is None:
        if calibrated is None:
            raise ValueError("p_squared is required for dimensions without defaults")
        p2 = calibrated.p_squared
    else:
        p2 = to_fraction(p_squared)
        if p2 <= 0:
            raise ValueError("p_squared must be positive")

    calibrated_here = None
    default_m = None
    if calibrated is not None:
        calibrated_here = _try_params(n, calibrated.alpha, calibrated.delta, calibrated.q, p2)
        if calibrated_here is not None:
            default_m = m_functional(calibrated_here)

    best = calibrated_here
    best_m = default_m
    evaluated = 0
    feasible = 1 if calibrated_here is not None else 0

    if budget == 0:
        return OptimizeResult(
            best=best,
            best_m=best_m,
            calibrated=calibrated_here,
            default_m=default_m,
            matches_or_improves_default=(None if default_m is None else best_m >= default_m),
            evaluated=evaluated,
            feasible_count=feasible,
            no_search=True,
        )

    def consider(alpha: Fraction, delta: Fraction, q: Fraction) -> None:
        nonlocal best, best_m, evaluated, feasible
        if evaluated >= budget:
            return
        evaluated += 1
        p = _try_params(n, alpha, delta, q, p2)
        if p is None:
            return
        feasible += 1
        value = m_functional(p)
        if best_m is None or value > best_m:
            best, best_m = p, value

    steps = max(2, round(budget ** (1.0 / 3.0)))
    alphas = [Fraction(i, steps + 1) for i in range(1, steps + 1)]
    deltas = [Fraction(i, steps + 1) for i in range(1, steps + 1)]
    qs = [Fraction(i, steps) for i in range(1, steps + 1)]
    for alpha in alphas:
        for delta in deltas:
            for q in qs:
                consider(alpha, delta, q)

    # Local refinement: shrink the grid around the incumbent.
    spacing = Fraction(1, steps + 1)
    rounds = 0
    while best is not None and evaluated < budget and rounds < 8:
        spacing /= 2
        base = (best.alpha, best.delta, best.q)
        for da in (-spacing, Fraction(0), spacing):
            for dd in (-spacing, Fraction(0), spacing):
                for dq in (-spacing, Fraction(0), spacing):
                    if da == dd == dq == 0:
                        continue
                    consider(base[0] + da, base[1] + dd, base[2] + dq)
        rounds += 1

    improves = None
    if default_m is not None and best_m is not None:
        improves = best_m >= default_m
    return OptimizeResult(
        best=best,
        best_m=best_m,
        calibrated=calibrated_here,
        default_m=default_m,
        matches_or_improves_default=improves,
        evaluated=evaluated,
        feasible_count=feasible,
        no_search=False,
    )


# ---------------------------------------------------------------------------
# The angle-free n = 3 case.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class N3Report:
    """Exponent coefficients of the n = 3 contradiction argument.

    The comparison function r^(1+eps) * max(1, r)^(-1/2 - 2 eps) has
    exponent beta = 1/2 - eps outside the unit ball and beta = 1 + eps
    inside; each contributes the coefficient c(beta) = 2 beta^2 - 2 beta.
    The curvature must vanish identically when both coefficients stay
    below 1.
    """

    c_outer: Fraction
    c_inner: Fraction
    contradiction_closes: bool


def n3_coefficients(eps: RationalLike) -> N3Report:
    """Exact exponent coefficients for the n = 3 argument; valid for eps >= 0."""
    eps = to_fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    beta_outer = Fraction(1, 2) - eps
    beta_inner = 1 + eps
    c_outer = 2 * beta_outer ** 2 - 2 * beta_outer
    c_inner = 2 * beta_inner ** 2 - 2 * beta_inner
    return N3Report(
        c_outer=c_outer,
        c_inner=c_inner,
        contradiction_closes=(c_outer < 1 and c_inner < 1),
    )
