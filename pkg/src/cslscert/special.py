"""Regularized incomplete beta function, its inverse, and spherical caps.

The forward function follows the classical continued-fraction evaluation
(modified Lentz iteration on the even/odd coefficient recurrence, with the
symmetry switch at x > (a+1)/(a+b+2)).  The inverse is a guarded bisection
on the forward function: monotonicity makes it unconditionally convergent,
which matters at the half-integer parameters the cap geometry uses.

The cap quantities: a spherical cap of measure eps on the unit sphere in
R^n has height threshold

    delta(eps) = sqrt(1 - inv_reg_inc_beta(2 eps; (n-1)/2, 1/2))

and any point of the sphere is within chord distance

    d(eps) = sqrt(2 - 2 delta(eps))

of the cap's pole direction whenever it lies inside the cap.  For n = 2
the arcsine law collapses delta to cos(pi * eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MACHEP = 1.1102230246251565e-16  # 2**-53
_CF_MAX_ITER = 300
_FPMIN = 1e-300


class DomainError(ValueError):
    """Argument outside the mathematical domain of a special function."""


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 10.0 * MACHEP:
            return h
    # The fraction converges in a few dozen terms for all (a, b, x) on the
    # evaluated side of the symmetry switch; reaching the cap means the
    # input was pathological.
    raise DomainError(f"incomplete beta continued fraction stalled at a={a}, b={b}, x={x}")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I(x; a, b)."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"parameters must be positive, got a={a}, b={b}")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def inv_reg_inc_beta(y: float, a: float, b: float) -> float:
    """Inverse of I(.; a, b): returns x with I(x; a, b) = y.

    Bisection on the monotone forward function; the returned x satisfies
    |I(x; a, b) - y| <= 1e-10 (far better in practice).
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"parameters must be positive, got a={a}, b={b}")
    if not (0.0 <= y <= 1.0):
        raise DomainError(f"y must lie in [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    x = 0.5
    for _ in range(200):
        x = 0.5 * (lo + hi)
        fx = reg_inc_beta(x, a, b)
        if abs(fx - y) <= 1e-14:
            return x
        if fx < y:
            lo = x
        else:
            hi = x
        if hi - lo <= MACHEP * max(hi, 1e-12):
            break
    return x


@dataclass(frozen=True)
class CapGeometry:
    """Height threshold and chord bound of a spherical cap of measure eps.

    ``degenerate`` is set when eps exceeds 1/2: the defining formula's
    argument 2*eps leaves [0, 1], so delta saturates at 0 (the "cap" is a
    hemisphere or more) and every bound built on it is vacuous.
    """

    epsilon: float
    delta: float
    d: float
    degenerate: bool


def cap_geometry(epsilon: float, n: int) -> CapGeometry:
    """delta(eps) and d(eps) for the unit sphere in R^n."""
    if epsilon < 0.0:
        raise DomainError(f"cap measure must be nonnegative, got {epsilon}")
    if n < 2:
        raise DomainError(f"cap geometry needs dimension n >= 2, got {n}")
    if epsilon == 0.0:
        # Empty cap: pole only.
        return CapGeometry(epsilon, 1.0, 0.0, False)
    if epsilon > 0.5:
        return CapGeometry(epsilon, 0.0, math.sqrt(2.0), True)
    inner = inv_reg_inc_beta(2.0 * epsilon, (n - 1) / 2.0, 0.5)
    delta = math.sqrt(max(0.0, 1.0 - inner))
    d = math.sqrt(max(0.0, 2.0 - 2.0 * delta))
    return CapGeometry(epsilon, delta, d, False)


def cap_delta(epsilon: float, n: int) -> float:
    """Height threshold delta(eps); saturates at 0 for eps > 1/2."""
    return cap_geometry(epsilon, n).delta


def cap_chord(epsilon: float, n: int) -> float:
    """Chord bound d(eps) = sqrt(2 - 2 delta(eps))."""
    return cap_geometry(epsilon, n).d
