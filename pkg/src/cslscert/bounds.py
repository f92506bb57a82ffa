"""Closed-form confidence bounds built on sampled certificates.

Everything here is a deterministic formula in the sample count N, the
structural constants (n, |V|, m), the chosen confidence splits, and the
solved candidate.  Two probabilistic ingredients combine into the final
growth-rate bound:

* a sensitivity bound: with probability at least beta, the optimum over
  *all* states is within an additive term of the sampled optimum, where
  the term couples the candidate's eigenvalue spread with the spherical
  chord d(eps) and the worst one-step amplification;
* a norm bound: with probability at least beta', the true maximal
  amplification is at most the sampled one inflated by 1/delta(...).

Their conjunction holds with probability at least beta + beta' - 1.

This module sees sampled data and structural counts only — never the
system matrices or mode labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .samples import SampleSet
from .solver import MqlfCandidate
from .special import cap_geometry

_INF = math.inf


class PreconditionError(ValueError):
    """A bound was requested outside its domain of validity."""


def support_threshold(v_count: int, n: int) -> int:
    """Minimum sample count for the sensitivity bound: |V| n (n+1) / 2."""
    return v_count * n * (n + 1) // 2


def epsilon_of_beta(beta: float, m: int, v_count: int, n: int, N: int) -> float:
    """Cap measure eps such that the support-distance event has
    probability at least beta:

        eps = m |V| (1 - (2 (1 - beta) / (|V| n (n+1)))^(1/N))

    Requires N >= |V| n (n+1) / 2.
    """
    if not (0.0 <= beta < 1.0):
        raise PreconditionError(f"beta must lie in [0, 1), got {beta}")
    thresh = support_threshold(v_count, n)
    if N < thresh:
        raise PreconditionError(
            f"N={N} is below the support threshold |V| n (n+1)/2 = {thresh}"
        )
    inner = 2.0 * (1.0 - beta) / (v_count * n * (n + 1))
    return m * v_count * (1.0 - inner ** (1.0 / N))


def beta_of_epsilon(epsilon: float, m: int, v_count: int, n: int, N: int) -> float:
    """Probability that the sampled program is within cap distance eps of
    a support set:

        beta = 1 - |V| n (n+1)/2 * (1 - eps / (m |V|))^N

    May be negative (vacuous) for small eps and N.
    """
    if not (0.0 <= epsilon <= m * v_count):
        raise PreconditionError(f"epsilon must lie in [0, m|V|] = [0, {m * v_count}], got {epsilon}")
    return 1.0 - v_count * n * (n + 1) / 2.0 * (1.0 - epsilon / (m * v_count)) ** N


@dataclass(frozen=True)
class ConfidenceSpec:
    """Confidence split (beta for the sensitivity bound, beta' for the
    norm bound); the combined level is beta + beta' - 1.

    Splits with beta + beta' - 1 < 0 are representable but every report
    built from them is flagged degenerate (the combined bound is vacuous).
    """

    beta: float
    beta_prime: float

    def __post_init__(self):
        for name, v in (("beta", self.beta), ("beta_prime", self.beta_prime)):
            if not (0.0 <= v < 1.0):
                raise ValueError(f"{name} must lie in [0, 1), got {v}")

    @property
    def level(self) -> float:
        return self.beta + self.beta_prime - 1.0

    @classmethod
    def from_level(cls, level: float) -> "ConfidenceSpec":
        """Equal split: beta = beta' = (1 + level) / 2."""
        if not (0.0 < level < 1.0):
            raise ValueError(f"combined confidence level must lie in (0, 1), got {level}")
        half = (1.0 + level) / 2.0
        return cls(half, half)


class Theorem1Result(NamedTuple):
    value: float
    epsilon: float
    delta_eps: float
    d_eps: float
    max_term: float
    degenerate: bool


class NormBoundResult(NamedTuple):
    value: float
    epsilon_prime: float
    delta_arg: float
    delta: float
    degenerate: bool


def sensitivity_max_term(lambda_stats: dict[int, tuple[float, float]],
                         pairs, gamma_hat: float, A_bound: float) -> float:
    """max over observed (u, v) pairs of
    sqrt(lam_max_u / lam_min_u) gamma + sqrt(lam_max_v / lam_min_u) A."""
    worst = 0.0
    for (u, v) in pairs:
        lo_u, hi_u = lambda_stats[u]
        _lo_v, hi_v = lambda_stats[v]
        term = math.sqrt(hi_u / lo_u) * gamma_hat + math.sqrt(hi_v / lo_u) * A_bound
        worst = max(worst, term)
    return worst


def theorem1_from_parts(gamma_hat: float, lambda_stats: dict[int, tuple[float, float]],
                        pairs, A_bound: float, d_eps: float) -> float:
    """The sensitivity upper bound as a pure formula:

        gamma + max_(u,v) {sqrt(lmax_u/lmin_u) gamma
                           + sqrt(lmax_v/lmin_u) A} * d(eps)

    Reduces to gamma_hat exactly when d_eps == 0.
    """
    if d_eps == 0.0:
        return gamma_hat
    return gamma_hat + sensitivity_max_term(lambda_stats, pairs, gamma_hat, A_bound) * d_eps


def theorem1_upper(candidate: MqlfCandidate, samples: SampleSet,
                   A_bound: float, beta: float) -> Theorem1Result:
    """Probabilistic upper bound on the all-states optimum.

    Holds with probability at least beta.  ``A_bound`` is an upper bound
    on the maximal one-step amplification (white-box value or the
    probabilistic surrogate).  Degenerate when the cap measure exceeds
    1/2 (the chord saturates and the bound carries no information).
    """
    if not candidate.certified:
        raise PreconditionError("candidate must be certified")
    if A_bound < 0.0:
        raise PreconditionError(f"A_bound must be nonnegative, got {A_bound}")
    N = len(samples)
    eps = epsilon_of_beta(beta, samples.m, samples.v_count, samples.n, N)
    geom = cap_geometry(eps, samples.n)
    if geom.degenerate:
        return Theorem1Result(_INF, eps, geom.delta, geom.d, _INF, True)
    if math.isinf(A_bound):
        return Theorem1Result(_INF, eps, geom.delta, geom.d, _INF, True)
    max_term = sensitivity_max_term(candidate.lambda_stats, samples.node_pairs(),
                                    candidate.gamma, A_bound)
    value = theorem1_from_parts(candidate.gamma, candidate.lambda_stats,
                                samples.node_pairs(), A_bound, geom.d)
    return Theorem1Result(value, eps, geom.delta, geom.d, max_term, False)


def theorem2_norm_bound(eta_hat: float, beta_prime: float, m: int, v_count: int,
                        n: int, N: int, corollary_form: bool = False) -> NormBoundResult:
    """Probabilistic upper bound on the true maximal amplification.

    With eps' = 1 - (1 - beta')^(1/N), the bound is

        eta_hat / delta(eps' m |V| / 2)          (default)
        eta_hat / delta((m / 2) (1 - (1-beta')^(1/N)))   (corollary_form)

    The two published forms of the cap argument differ by the |V| factor;
    the default keeps it (the more conservative reading), and
    ``corollary_form=True`` evaluates the other for side-by-side
    comparison.  Holds with probability at least beta'.  Degenerate when
    the cap argument reaches 1/2 (delta hits 0 and the quotient blows up).
    """
    if not (0.0 <= beta_prime < 1.0):
        raise PreconditionError(f"beta_prime must lie in [0, 1), got {beta_prime}")
    if N < 1:
        raise PreconditionError(f"N must be >= 1, got {N}")
    if eta_hat < 0.0:
        raise PreconditionError(f"eta_hat must be nonnegative, got {eta_hat}")
    eps_prime = 1.0 - (1.0 - beta_prime) ** (1.0 / N)
    if corollary_form:
        delta_arg = (m / 2.0) * eps_prime
    else:
        delta_arg = eps_prime * m * v_count / 2.0
    if delta_arg >= 0.5:
        return NormBoundResult(_INF, eps_prime, delta_arg, 0.0, True)
    geom = cap_geometry(delta_arg, n)
    return NormBoundResult(eta_hat / geom.delta, eps_prime, delta_arg, geom.delta, False)


def deterministic_lower(candidate: MqlfCandidate, n: int) -> float:
    """n^(-1/2) times the candidate gamma.

    Because the reported gamma can sit above the true sampled optimum by
    solver slack, this value is a heuristic lower bound up to that slack;
    the cycle-based bound is the fully guaranteed one.
    """
    if not candidate.certified:
        raise PreconditionError("candidate must be certified")
    return candidate.gamma / math.sqrt(n)


@dataclass(frozen=True)
class BoundsReport:
    """Everything one sweep point knows about the growth-rate bracket."""

    N: int
    n: int
    v_count: int
    m: int
    gamma_hat: float
    eta_hat: float
    beta: float
    beta_prime: float
    epsilon: float
    epsilon_prime: float
    delta_eps: float
    d_eps: float
    delta_eps_prime_arg: float
    lower_bound_sdp: float
    lower_bound_cycles: float | None
    upper_bound: float
    confidence_level: float
    degenerate: bool
    stability_certified: bool

    def __post_init__(self):
        # Soundness tripwire: the guaranteed lower bound must never cross
        # a non-degenerate upper bound.
        if (self.lower_bound_cycles is not None and not self.degenerate
                and math.isfinite(self.upper_bound)
                and self.lower_bound_cycles > self.upper_bound + 1e-12):
            raise ValueError(
                f"soundness violation: cycle lower bound {self.lower_bound_cycles} "
                f"exceeds upper bound {self.upper_bound}"
            )


def corollary_upper(candidate: MqlfCandidate, samples: SampleSet, eta_hat: float,
                    spec: ConfidenceSpec, corollary_form: bool = False,
                    lower_cycles: float | None = None) -> BoundsReport:
    """Combined growth-rate bound report at confidence beta + beta' - 1.

    Feeds the norm surrogate into the sensitivity bound and fills every
    report field.  Degenerate when either ingredient is degenerate or the
    combined confidence level is not positive.
    """
    N = len(samples)
    t2 = theorem2_norm_bound(eta_hat, spec.beta_prime, samples.m, samples.v_count,
                             samples.n, N, corollary_form=corollary_form)
    t1 = theorem1_upper(candidate, samples, t2.value if not t2.degenerate else _INF,
                        spec.beta)
    vacuous_level = spec.level <= 0.0
    degenerate = t1.degenerate or t2.degenerate or vacuous_level
    upper = _INF if degenerate else t1.value
    return BoundsReport(
        N=N,
        n=samples.n,
        v_count=samples.v_count,
        m=samples.m,
        gamma_hat=candidate.gamma,
        eta_hat=eta_hat,
        beta=spec.beta,
        beta_prime=spec.beta_prime,
        epsilon=t1.epsilon,
        epsilon_prime=t2.epsilon_prime,
        delta_eps=t1.delta_eps,
        d_eps=t1.d_eps,
        delta_eps_prime_arg=t2.delta_arg,
        lower_bound_sdp=deterministic_lower(candidate, samples.n),
        lower_bound_cycles=lower_cycles,
        upper_bound=upper,
        confidence_level=spec.level,
        degenerate=degenerate,
        stability_certified=bool(upper < 1.0 and not degenerate),
    )
