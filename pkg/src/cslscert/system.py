"""Ground-truth system oracle: holds the matrices, produces observations.

This is the only module that knows the mode matrices.  It simulates
trajectories, draws the random observations the solvers consume, and
computes white-box quantities (the true maximal one-step norm).  Mode
labels of drawn observations are kept in a registry private to this
module — keyed by sample-set identity — so tests can audit ``y = A_l x``
without the labels ever travelling with the data.

Randomness: a master integer seed (or ``numpy.random.SeedSequence``) is
split into two child streams, one for sphere points and one for edges.
Each observation consumes a fixed stretch of its stream in index order,
so the first N observations of a longer draw coincide exactly with a
draw of size N at the same seed (nested sample sets for free), and sweep
points derived from (seed, N) are reproducible regardless of scheduling.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .automaton import Automaton, Edge, accepts_word, validate
from .linalg import spectral_norm
from .samples import SampleSet, eta_sampled  # noqa: F401  (re-export: oracle-side API)

_ZERO_DRAW_TOL = 1e-12

# Mode labels of drawn observations, retrievable only through
# observed_labels() below.  Weak keys: the entry dies with the sample set.
_LABELS: "weakref.WeakKeyDictionary[SampleSet, np.ndarray]" = weakref.WeakKeyDictionary()


@dataclass(frozen=True, eq=False)
class Csls:
    """A constrained switching linear system: automaton + mode matrices.

    ``matrices[l - 1]`` is the n-by-n matrix applied by mode label l.
    """

    automaton: Automaton
    matrices: tuple[np.ndarray, ...]
    n: int

    def __post_init__(self):
        mats = tuple(np.array(M, dtype=np.float64) for M in self.matrices)
        object.__setattr__(self, "matrices", mats)
        if len(mats) != self.automaton.label_count:
            raise ValueError(
                f"need one matrix per label: got {len(mats)} matrices for "
                f"{self.automaton.label_count} labels"
            )
        for l, M in enumerate(mats, start=1):
            if M.shape != (self.n, self.n):
                raise ValueError(f"matrix for label {l} has shape {M.shape}, expected ({self.n}, {self.n})")
            if not np.all(np.isfinite(M)):
                raise ValueError(f"matrix for label {l} has non-finite entries")

    def matrix(self, label: int) -> np.ndarray:
        if not (1 <= label <= len(self.matrices)):
            raise ValueError(f"label {label} outside 1..{len(self.matrices)}")
        return self.matrices[label - 1]


def step(csls: Csls, x, edge: Edge) -> np.ndarray:
    """Apply the mode carried by ``edge``: returns A_label @ x."""
    if edge not in csls.automaton.edges:
        raise ValueError(f"edge {edge} is not in the automaton")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (csls.n,):
        raise ValueError(f"state has shape {x.shape}, expected ({csls.n},)")
    return csls.matrix(edge[2]) @ x


def sample_unit_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the unit sphere (normalized standard normal)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    while True:
        v = rng.standard_normal(n)
        norm = float(np.linalg.norm(v))
        if norm > _ZERO_DRAW_TOL:  # zero draw has measure zero; resample
            return v / norm


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def draw_observations(csls: Csls, N: int, seed) -> SampleSet:
    """Draw N i.i.d. observations: x uniform on the sphere, edge uniform on E.

    ``seed`` is an integer or a ``SeedSequence``.  The observation at
    index i is a deterministic function of (seed, i); see the module
    docstring for the nesting guarantee.
    """
    if N < 1:
        raise ValueError(f"need at least one observation, got N={N}")
    report = validate(csls.automaton)
    if not report.ok:
        raise ValueError("invalid automaton: " + "; ".join(report.problems))
    n = csls.n
    ss_x, ss_e = _seed_sequence(seed).spawn(2)
    rng_x = np.random.Generator(np.random.PCG64(ss_x))
    rng_e = np.random.Generator(np.random.PCG64(ss_e))

    X = rng_x.standard_normal((N, n))
    norms = np.linalg.norm(X, axis=1)
    bad = norms <= _ZERO_DRAW_TOL
    while np.any(bad):  # measure-zero; keeps the law exact anyway
        X[bad] = rng_x.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(X, axis=1)
        bad = norms <= _ZERO_DRAW_TOL
    X /= norms[:, None]

    eidx = rng_e.integers(0, csls.automaton.edge_count, size=N)
    einfo = csls.automaton.edges_indexed()
    U = einfo[eidx, 0]
    V = einfo[eidx, 1]
    labels = einfo[eidx, 2]

    # y_k = sum_j A[k, j] x_j accumulated coordinate by coordinate: each
    # row's bits depend only on that row, never on the batch shape, so the
    # first N rows of a longer draw stay bitwise identical to a draw of
    # size N (a batched matmul would not guarantee that).
    Y = np.empty_like(X)
    for l in range(1, csls.automaton.label_count + 1):
        mask = labels == l
        if np.any(mask):
            A = csls.matrices[l - 1]
            Xl = X[mask]
            acc = Xl[:, 0][:, None] * A[:, 0][None, :]
            for j in range(1, n):
                acc += Xl[:, j][:, None] * A[:, j][None, :]
            Y[mask] = acc

    samples = SampleSet(
        X, Y, U, V, n,
        csls.automaton.node_count, csls.automaton.edge_count, csls.automaton.label_count,
    )
    _LABELS[samples] = labels.copy()
    return samples


def observed_labels(samples: SampleSet) -> np.ndarray:
    """Oracle-side accessor for the mode labels behind a drawn sample set.

    Exists for tests and diagnostics only; raises for sample sets that
    did not come out of :func:`draw_observations` in this process.
    """
    try:
        return _LABELS[samples].copy()
    except KeyError:
        raise KeyError("no recorded labels for this sample set (not drawn here)") from None


def max_norm_whitebox(csls: Csls) -> float:
    """True maximal one-step amplification: max over modes of ||A_l||."""
    return max(spectral_norm(M) for M in csls.matrices)


def simulate(csls: Csls, x0, word) -> np.ndarray:
    """Trajectory x0, A_{w0} x0, A_{w1} A_{w0} x0, ... for an accepted word."""
    word = [int(l) for l in word]
    if not accepts_word(csls.automaton, word):
        raise ValueError(f"word {word} is not accepted by the automaton")
    x = np.asarray(x0, dtype=np.float64)
    if x.shape != (csls.n,):
        raise ValueError(f"initial state has shape {x.shape}, expected ({csls.n},)")
    out = np.empty((len(word) + 1, csls.n))
    out[0] = x
    for t, l in enumerate(word):
        out[t + 1] = csls.matrix(l) @ out[t]
    return out
