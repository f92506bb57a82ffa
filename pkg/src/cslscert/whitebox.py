"""White-box baselines: grid-certified gamma and the brute-force cycle bound.

These operations live on the oracle side — they need the true mode
matrices — and exist to benchmark what the sampled machinery infers
without them.

``whitebox_gamma`` fits quadratic forms on a dense deterministic grid of
sphere directions (every edge constrained at every grid direction), then
discards the grid and certifies exactly: the reported gamma squared is
the largest generalized eigenvalue of A_l^T P_v A_l against P_u over all
edges, so the contraction inequalities hold for *every* state, not just
grid points.  The result is a true upper bound on the growth rate, and
dividing by sqrt(n) gives a true lower bound; a coarse grid can only make
the reported value larger, never unsound.

``cjsr_lower_bruteforce`` evaluates admissible cycles directly: any cycle
of length t and spectral radius r proves the growth rate is at least
r**(1/t).
"""

from __future__ import annotations

import math

import numpy as np

from .automaton import enumerate_cycles, validate
from .linalg import max_generalized_eig, spectral_radius
from .samples import SampleSet
from .solver import MqlfCandidate, SolverConfig, _ConstraintData, _lambda_stats, polish_gamma
from .system import Csls


def _grid_samples(csls: Csls, grid_density: int) -> SampleSet:
    """Every edge constrained at grid_density equally spaced directions."""
    if csls.n != 2:
        raise NotImplementedError(
            "the deterministic sphere grid is defined for dimension 2"
        )
    if grid_density < 4:
        raise ValueError(f"grid_density must be >= 4, got {grid_density}")
    theta = 2.0 * math.pi * np.arange(grid_density) / grid_density
    Xg = np.column_stack([np.cos(theta), np.sin(theta)])
    # Guard against rounding drift in the trigonometric grid.
    Xg /= np.linalg.norm(Xg, axis=1)[:, None]

    einfo = csls.automaton.edges_indexed()
    E = einfo.shape[0]
    X = np.tile(Xg, (E, 1))
    U = np.repeat(einfo[:, 0], grid_density)
    V = np.repeat(einfo[:, 1], grid_density)
    labels = np.repeat(einfo[:, 2], grid_density)
    Y = np.empty_like(X)
    for l in range(1, csls.automaton.label_count + 1):
        mask = labels == l
        if np.any(mask):
            Y[mask] = X[mask] @ csls.matrices[l - 1].T
    return SampleSet(X, Y, U, V, csls.n,
                     csls.automaton.node_count, csls.automaton.edge_count,
                     csls.automaton.label_count)


def _edge_lmi_gamma(csls: Csls, Parr: np.ndarray) -> float:
    """Exact certified gamma for fixed forms: sqrt of the worst edge LMI."""
    worst = 0.0
    for (u, v, l) in csls.automaton.edges:
        ui = csls.automaton.node_index(u)
        vi = csls.automaton.node_index(v)
        A = csls.matrices[l - 1]
        S = A.T @ Parr[vi] @ A
        S = 0.5 * (S + S.T)
        worst = max(worst, max_generalized_eig(S, Parr[ui]))
    return math.sqrt(max(worst, 0.0))


def whitebox_gamma(csls: Csls, grid_density: int = 720,
                   cfg: SolverConfig | None = None) -> tuple[float, dict[int, np.ndarray]]:
    """Grid-fitted, exactly LMI-certified gamma for a known system.

    Returns ``(gamma_certified, P)``.  The pair satisfies
    A_l^T P_v A_l <= gamma_certified^2 P_u on every edge, so the true
    growth rate lies in [gamma_certified / sqrt(n), gamma_certified].
    """
    cfg = cfg or SolverConfig()
    report = validate(csls.automaton)
    if not report.ok:
        raise ValueError("invalid automaton: " + "; ".join(report.problems))
    samples = _grid_samples(csls, grid_density)
    data = _ConstraintData(samples)
    Vc = samples.v_count

    identity_P = np.broadcast_to(np.eye(csls.n), (Vc, csls.n, csls.n)).copy()
    best_gamma = _edge_lmi_gamma(csls, identity_P)
    best_P = identity_P

    # Bisect on the grid program, but score candidates by their exact
    # edge-LMI value: the grid only steers, the LMI certifies.
    lo = 0.0
    hi = polish_gamma(samples, identity_P)
    Z_warm = data.identity_Z()
    guard = 0
    while hi - lo > cfg.tol_gamma and guard < 200:
        guard += 1
        mid = 0.5 * (lo + hi)
        Z = Z_warm.copy()
        ok, _rounds, _maxdist = data.probe(Z, mid, cfg)
        # Stalled iterates still carry information: their exact LMI value
        # certifies on its own, independent of the grid.
        Parr = data.unpack(Z)
        g_grid = polish_gamma(samples, Parr)
        g_exact = _edge_lmi_gamma(csls, Parr)
        if g_exact < best_gamma:
            best_gamma = g_exact
            best_P = Parr
        if ok or g_grid <= mid:
            hi = min(mid, g_grid)
            Z_warm = Z
        else:
            lo = mid

    return best_gamma, {u: best_P[u] for u in range(Vc)}


def whitebox_candidate(csls: Csls, grid_density: int = 720,
                       cfg: SolverConfig | None = None) -> MqlfCandidate:
    """:func:`whitebox_gamma` wrapped as a candidate with spectral stats."""
    gamma, P = whitebox_gamma(csls, grid_density, cfg)
    Parr = np.stack([P[u] for u in range(len(P))])
    return MqlfCandidate(gamma, P, True, _lambda_stats(Parr),
                         {"source": "whitebox-grid", "grid_density": grid_density})


def cjsr_lower_bruteforce(csls: Csls, max_cycle_length: int) -> float:
    """Best cycle-product growth-rate lower bound up to the given length.

    Walk order: for a cycle with edge labels (l_1, ..., l_t) the product
    is A_{l_t} ... A_{l_1}.  The returned value is
    max over cycles of spectral_radius(product) ** (1 / length), which is
    nondecreasing in max_cycle_length and never exceeds the true rate.
    """
    if max_cycle_length < 1:
        raise ValueError(f"max_cycle_length must be >= 1, got {max_cycle_length}")
    best = 0.0
    for cyc in enumerate_cycles(csls.automaton, max_cycle_length):
        M = np.eye(csls.n)
        for (_u, _v, l) in cyc.edges:
            M = csls.matrices[l - 1] @ M
        rho = spectral_radius(M)
        if rho > 0.0:
            best = max(best, rho ** (1.0 / cyc.length))
    return best
