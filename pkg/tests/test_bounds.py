"""Closed-form confidence bounds and their report plumbing."""

import math

import numpy as np
import pytest

import cslscert as cc
from cslscert.bounds import (
    BoundsReport,
    ConfidenceSpec,
    PreconditionError,
    beta_of_epsilon,
    deterministic_lower,
    epsilon_of_beta,
    sensitivity_max_term,
    support_threshold,
    theorem1_from_parts,
    theorem1_upper,
    theorem2_norm_bound,
)

M, V, N_DIM = 4, 4, 2  # bundled-graph constants used throughout


def test_support_threshold():
    assert support_threshold(4, 2) == 12
    assert support_threshold(3, 3) == 18


def test_epsilon_beta_round_trip():
    for N in (12, 100, 5000):
        for beta in (0.0, 0.5, 0.9, 0.975, 0.999):
            eps = epsilon_of_beta(beta, M, V, N_DIM, N)
            assert 0.0 <= eps <= M * V
            back = beta_of_epsilon(eps, M, V, N_DIM, N)
            assert abs(back - beta) < 1e-12
    for N in (20, 400):
        for eps in (0.05, 0.5, 2.0):
            beta = beta_of_epsilon(eps, M, V, N_DIM, N)
            if 0.0 <= beta < 1.0:  # vacuous or saturated values can't invert
                assert abs(epsilon_of_beta(beta, M, V, N_DIM, N) - eps) < 1e-12


def test_epsilon_of_beta_preconditions():
    with pytest.raises(PreconditionError):
        epsilon_of_beta(0.9, M, V, N_DIM, 11)  # below |V| n (n+1) / 2 = 12
    with pytest.raises(PreconditionError):
        epsilon_of_beta(1.0, M, V, N_DIM, 100)
    with pytest.raises(PreconditionError):
        epsilon_of_beta(-0.1, M, V, N_DIM, 100)
    with pytest.raises(PreconditionError):
        beta_of_epsilon(-1.0, M, V, N_DIM, 100)
    with pytest.raises(PreconditionError):
        beta_of_epsilon(17.0, M, V, N_DIM, 100)  # above m |V| = 16
    # vacuous (negative) confidence is representable, not an error
    assert beta_of_epsilon(1e-6, M, V, N_DIM, 12) < 0.0


def test_epsilon_decreases_with_N():
    eps = [epsilon_of_beta(0.95, M, V, N_DIM, N) for N in (12, 50, 500, 5000)]
    assert all(e2 < e1 for e1, e2 in zip(eps, eps[1:]))


def test_confidence_spec():
    spec = ConfidenceSpec.from_level(0.95)
    assert abs(spec.beta - 0.975) < 1e-15
    assert abs(spec.beta_prime - 0.975) < 1e-15
    assert abs(spec.level - 0.95) < 1e-15
    with pytest.raises(ValueError):
        ConfidenceSpec.from_level(0.0)
    with pytest.raises(ValueError):
        ConfidenceSpec(1.0, 0.5)
    # a vacuous split is representable; reports built on it are degenerate
    assert ConfidenceSpec(0.3, 0.4).level < 0.0


def test_theorem1_from_parts_exact_at_zero_chord():
    stats = {0: (1.0, 3.0), 1: (1.0, 2.0)}
    pairs = {(0, 1), (1, 0)}
    g = 0.7071067811865476
    assert theorem1_from_parts(g, stats, pairs, 0.61, 0.0) == g  # bitwise
    # hand-computed single-pair case
    val = theorem1_from_parts(2.0, {0: (1.0, 4.0)}, {(0, 0)}, 3.0, 0.5)
    # max term = sqrt(4/1)*2 + sqrt(4/1)*3 = 10; value = 2 + 10*0.5
    assert abs(val - 7.0) < 1e-14


def test_sensitivity_max_term_picks_worst_pair():
    stats = {0: (1.0, 9.0), 1: (4.0, 4.0)}
    pairs = [(0, 1), (1, 0)]
    # pair (0,1): 3 g + 2 A ; pair (1,0): g + (3/2) A
    g, A = 0.5, 1.0
    assert abs(sensitivity_max_term(stats, pairs, g, A) - (1.5 + 2.0)) < 1e-14


def test_theorem2_exact_at_zero_confidence():
    r = theorem2_norm_bound(0.61, 0.0, M, V, N_DIM, 1000)
    # beta' = 0 gives eps' = 0, delta = 1; the bound is the estimate itself
    assert r.value == 0.61 and not r.degenerate
    assert r.delta == 1.0


def test_theorem2_degenerates_at_tiny_N():
    r = theorem2_norm_bound(0.61, 0.99, M, V, N_DIM, 2)
    assert r.degenerate and math.isinf(r.value)
    # the same request with plenty of samples is informative
    r2 = theorem2_norm_bound(0.61, 0.99, M, V, N_DIM, 5000)
    assert not r2.degenerate
    assert 0.61 < r2.value < 0.63


def test_theorem2_corollary_form_is_less_conservative():
    a = theorem2_norm_bound(0.61, 0.99, M, V, N_DIM, 5000)
    b = theorem2_norm_bound(0.61, 0.99, M, V, N_DIM, 5000, corollary_form=True)
    # dropping the node-count factor shrinks the cap argument
    assert b.delta_arg < a.delta_arg
    assert b.value <= a.value
    assert b.value >= 0.61


def test_theorem2_preconditions():
    with pytest.raises(PreconditionError):
        theorem2_norm_bound(0.61, 1.0, M, V, N_DIM, 100)
    with pytest.raises(PreconditionError):
        theorem2_norm_bound(0.61, 0.5, M, V, N_DIM, 0)
    with pytest.raises(PreconditionError):
        theorem2_norm_bound(-0.1, 0.5, M, V, N_DIM, 100)


def make_certified_candidate(gamma=0.6):
    P = {0: np.eye(2), 1: np.diag([1.0, 2.0])}
    stats = {0: (1.0, 1.0), 1: (1.0, 2.0)}
    return cc.MqlfCandidate(gamma, P, True, stats)


def make_samples(N=100, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((N, 2))
    X /= np.linalg.norm(X, axis=1)[:, None]
    Y = 0.55 * X
    U = rng.integers(0, 2, size=N)
    V = 1 - U
    return cc.SampleSet(X, Y, U, V, 2, 2, 2, 1)


def test_theorem1_upper_requires_certificate():
    s = make_samples()
    cand = cc.MqlfCandidate(0.6, {0: np.eye(2), 1: np.eye(2)}, False,
                            {0: (1.0, 1.0), 1: (1.0, 1.0)})
    with pytest.raises(PreconditionError):
        theorem1_upper(cand, s, 0.61, 0.95)
    with pytest.raises(PreconditionError):
        theorem1_upper(make_certified_candidate(), s, -1.0, 0.95)


def test_theorem1_upper_formula_agrees_with_parts():
    s = make_samples(N=400)
    cand = make_certified_candidate()
    r = theorem1_upper(cand, s, 0.7, 0.975)
    assert not r.degenerate
    eps = epsilon_of_beta(0.975, s.m, s.v_count, s.n, 400)
    assert abs(r.epsilon - eps) < 1e-15
    d = cc.cap_chord(eps, 2)
    expect = theorem1_from_parts(0.6, cand.lambda_stats, s.node_pairs(), 0.7, d)
    assert abs(r.value - expect) < 1e-14
    assert r.value > 0.6
    # infinite amplification surrogate gives a degenerate result
    assert theorem1_upper(cand, s, math.inf, 0.975).degenerate


def test_theorem1_upper_degenerate_below_cap_domain():
    s = make_samples(N=13)  # above the support threshold (6 here), still tiny
    r = theorem1_upper(make_certified_candidate(), s, 0.7, 0.99)
    # eps at N=13 exceeds 1/2: chord saturates, no information
    assert r.degenerate and math.isinf(r.value)


def test_deterministic_lower():
    cand = make_certified_candidate(gamma=0.6)
    assert deterministic_lower(cand, 2) == 0.6 / math.sqrt(2.0)
    cand_un = cc.MqlfCandidate(0.6, cand.P, False, cand.lambda_stats)
    with pytest.raises(PreconditionError):
        deterministic_lower(cand_un, 2)


def test_corollary_upper_report_fields():
    s = make_samples(N=2000, seed=3)
    cand = make_certified_candidate(gamma=0.58)
    spec = ConfidenceSpec.from_level(0.95)
    rep = cc.corollary_upper(cand, s, 0.55, spec, lower_cycles=0.5)
    assert rep.N == 2000 and rep.m == 1 and rep.v_count == 2
    assert not rep.degenerate
    assert rep.confidence_level == spec.level
    assert rep.lower_bound_sdp == 0.58 / math.sqrt(2.0)
    assert rep.lower_bound_cycles == 0.5
    assert rep.upper_bound > rep.gamma_hat
    assert rep.stability_certified == (rep.upper_bound < 1.0)
    # vacuous split: flagged degenerate, never certified
    rep2 = cc.corollary_upper(cand, s, 0.55, ConfidenceSpec(0.4, 0.4))
    assert rep2.degenerate and not rep2.stability_certified
    assert math.isinf(rep2.upper_bound)


def test_bounds_report_soundness_tripwire():
    with pytest.raises(ValueError):
        BoundsReport(
            N=100, n=2, v_count=4, m=4, gamma_hat=0.5, eta_hat=0.6,
            beta=0.975, beta_prime=0.975, epsilon=0.1, epsilon_prime=0.01,
            delta_eps=0.9, d_eps=0.4, delta_eps_prime_arg=0.1,
            lower_bound_sdp=0.35, lower_bound_cycles=0.9,  # above the upper bound
            upper_bound=0.8, confidence_level=0.95,
            degenerate=False, stability_certified=True,
        )
