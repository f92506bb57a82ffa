"""Observation containers shared by the oracle and the solvers.

An observation is a pair of (state, node) points: the system was at unit
state ``x`` on node ``u``, one admissible edge fired, and it landed at
state ``y`` on node ``v``.  Which mode produced the jump is deliberately
absent here: solvers must work without it.  The oracle side (see
``system``) keeps mode labels in its own private bookkeeping for tests
and diagnostics; nothing in this module can reach them.

For solver throughput the set is stored as flat arrays rather than as a
list of objects; :class:`Observation` views are materialized on demand.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class Observation:
    """One observed transition ((x, u) -> (y, v)); x has unit norm."""

    x: np.ndarray
    u: int
    y: np.ndarray
    v: int


@dataclass(eq=False)
class SampleSet:
    """N observations plus the public structural constants of the graph.

    ``X``/``Y`` are (N, n) float arrays (rows are states), ``U``/``V`` are
    (N,) integer node indices.  ``v_count``, ``e_count`` and ``m`` are the
    only facts about the underlying system carried along: node, edge and
    label counts.  Identity-based equality keeps instances usable as keys
    in oracle-side registries.
    """

    X: np.ndarray
    Y: np.ndarray
    U: np.ndarray
    V: np.ndarray
    n: int
    v_count: int
    e_count: int
    m: int

    def __post_init__(self):
        self.X = np.ascontiguousarray(self.X, dtype=np.float64)
        self.Y = np.ascontiguousarray(self.Y, dtype=np.float64)
        self.U = np.ascontiguousarray(self.U, dtype=np.int64)
        self.V = np.ascontiguousarray(self.V, dtype=np.int64)
        N = self.X.shape[0]
        if self.X.shape != (N, self.n) or self.Y.shape != (N, self.n):
            raise ValueError("state arrays must have shape (N, n)")
        if self.U.shape != (N,) or self.V.shape != (N,):
            raise ValueError("node index arrays must have shape (N,)")
        if N == 0:
            raise ValueError("a sample set needs at least one observation")
        norms = np.linalg.norm(self.X, axis=1)
        if float(np.abs(norms - 1.0).max()) > UNIT_NORM_TOL:
            raise ValueError("initial states must lie on the unit sphere")
        for name, arr in (("U", self.U), ("V", self.V)):
            if arr.min() < 0 or arr.max() >= self.v_count:
                raise ValueError(f"{name} contains node indices outside 0..{self.v_count - 1}")

    def __len__(self) -> int:
        return self.X.shape[0]

    def observation(self, i: int) -> Observation:
        return Observation(self.X[i].copy(), int(self.U[i]), self.Y[i].copy(), int(self.V[i]))

    def prefix(self, N: int) -> "SampleSet":
        """The first N observations as a new set (views, zero copy)."""
        if not (1 <= N <= len(self)):
            raise ValueError(f"prefix length {N} outside 1..{len(self)}")
        return SampleSet(
            self.X[:N], self.Y[:N], self.U[:N], self.V[:N],
            self.n, self.v_count, self.e_count, self.m,
        )

    def node_pairs(self) -> set[tuple[int, int]]:
        """Distinct (source, target) node index pairs among observations."""
        return set(zip(self.U.tolist(), self.V.tolist()))

    # -- serialization (audit format) ------------------------------------

    def to_csv(self, path) -> None:
        """Write columns idx,u,v,x_1..x_n,y_1..y_n (no mode information).

        ``path`` may be a filesystem path or an open text stream.
        """
        n = self.n
        header = ["idx", "u", "v"] + [f"x_{j+1}" for j in range(n)] + [
            f"y_{j+1}" for j in range(n)
        ]
        fh = path if hasattr(path, "write") else open(path, "w", newline="")
        try:
            w = csv.writer(fh)
            w.writerow(header)
            for i in range(len(self)):
                row = [i, int(self.U[i]), int(self.V[i])]
                row += [repr(float(v)) for v in self.X[i]]
                row += [repr(float(v)) for v in self.Y[i]]
                w.writerow(row)
        finally:
            if fh is not path:
                fh.close()


def from_csv(path, v_count: int, e_count: int, m: int) -> SampleSet:
    """Read a sample-set CSV written by :meth:`SampleSet.to_csv`.

    The structural constants are not part of the file format and must be
    supplied by the caller.
    """
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        xcols = [c for c in header if c.startswith("x_")]
        n = len(xcols)
        if n == 0 or header[:3] != ["idx", "u", "v"]:
            raise ValueError(f"{path}: not a sample-set CSV (header {header[:5]}...)")
        X, Y, U, V = [], [], [], []
        for row in r:
            U.append(int(row[1]))
            V.append(int(row[2]))
            X.append([float(v) for v in row[3 : 3 + n]])
            Y.append([float(v) for v in row[3 + n : 3 + 2 * n]])
    return SampleSet(np.array(X), np.array(Y), np.array(U), np.array(V), n, v_count, e_count, m)


def eta_sampled(samples: SampleSet) -> float:
    """Largest observed one-step amplification max_i ||y_i||.

    Initial states are unit vectors, so this is exactly the optimal value
    of the sampled norm-estimation problem.
    """
    return float(np.linalg.norm(samples.Y, axis=1).max())
