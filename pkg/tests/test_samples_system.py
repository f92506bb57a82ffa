"""Observation oracle: sphere sampling, nesting, label hiding, serialization."""

import io

import numpy as np
import pytest

import cslscert as cc
from cslscert.samples import SampleSet, from_csv


def test_step_applies_edge_mode(example_csls):
    y = cc.step(example_csls, [1.0, 0.0], ("i", "l", 4))
    # first column of the mode-4 matrix
    assert np.allclose(y, [0.47, 0.07], atol=1e-15)
    with pytest.raises(ValueError):
        cc.step(example_csls, [1.0, 0.0], ("l", "i", 2))  # not an edge
    with pytest.raises(ValueError):
        cc.step(example_csls, [1.0, 0.0, 0.0], ("i", "i", 1))


def test_sample_unit_sphere_law():
    rng = np.random.default_rng(0)
    pts = np.array([cc.sample_unit_sphere(2, rng) for _ in range(18_000)])
    assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) < 1e-12
    # angles uniform on [-pi, pi): 36 bins, 3.5 sigma band
    angles = np.arctan2(pts[:, 1], pts[:, 0])
    counts, _ = np.histogram(angles, bins=36, range=(-np.pi, np.pi))
    expect = len(pts) / 36
    sigma = (len(pts) * (1 / 36) * (35 / 36)) ** 0.5
    assert np.max(np.abs(counts - expect)) < 3.5 * sigma
    with pytest.raises(ValueError):
        cc.sample_unit_sphere(0, rng)


def test_draw_observations_deterministic(example_csls):
    s1 = cc.draw_observations(example_csls, 200, seed=9)
    s2 = cc.draw_observations(example_csls, 200, seed=9)
    assert np.array_equal(s1.X, s2.X)
    assert np.array_equal(s1.Y, s2.Y)
    assert np.array_equal(s1.U, s2.U)
    assert np.array_equal(s1.V, s2.V)
    s3 = cc.draw_observations(example_csls, 200, seed=10)
    assert not np.array_equal(s1.X, s3.X)


def test_draw_observations_nested_in_N(example_csls):
    """The first N rows of a longer draw equal the length-N draw exactly,
    so sweeps over N can reuse one stream per seed."""
    big = cc.draw_observations(example_csls, 1000, seed=5)
    for N in (1, 7, 100, 999):
        small = cc.draw_observations(example_csls, N, seed=5)
        assert np.array_equal(small.X, big.X[:N])
        assert np.array_equal(small.Y, big.Y[:N])
        assert np.array_equal(small.U, big.U[:N])
        assert np.array_equal(small.V, big.V[:N])
        pre = big.prefix(N)
        assert np.array_equal(pre.X, small.X)
        assert len(pre) == N


def test_observations_consistent_with_hidden_modes(example_csls):
    """Oracle-side audit: y_i = A_{label_i} x_i and (u_i, v_i, label_i) is a
    real edge.  Labels come from the oracle registry, not the sample set."""
    s = cc.draw_observations(example_csls, 500, seed=3)
    labels = cc.observed_labels(s)
    eidx = example_csls.automaton.edges_indexed()
    valid = {(int(u), int(v), int(l)) for (u, v, l) in eidx}
    for i in range(len(s)):
        li = int(labels[i])
        assert (int(s.U[i]), int(s.V[i]), li) in valid
        assert np.allclose(s.Y[i], example_csls.matrices[li - 1] @ s.X[i], atol=1e-14)
    assert np.max(np.abs(np.linalg.norm(s.X, axis=1) - 1.0)) < 1e-12


def test_observed_labels_refuses_foreign_sets(example_csls):
    s = cc.draw_observations(example_csls, 10, seed=0)
    clone = SampleSet(s.X.copy(), s.Y.copy(), s.U.copy(), s.V.copy(),
                      s.n, s.v_count, s.e_count, s.m)
    with pytest.raises(KeyError):
        cc.observed_labels(clone)


def test_eta_sampled(example_csls):
    s = cc.draw_observations(example_csls, 2000, seed=1)
    eta = cc.eta_sampled(s)
    assert eta == float(np.linalg.norm(s.Y, axis=1).max())
    # the sampled maximum never exceeds the white-box one and grows with N
    assert eta <= cc.max_norm_whitebox(example_csls) + 1e-12
    assert cc.eta_sampled(s.prefix(100)) <= eta


def test_max_norm_whitebox(example_csls):
    ref = max(np.linalg.norm(M, 2) for M in example_csls.matrices)
    assert abs(cc.max_norm_whitebox(example_csls) - ref) < 1e-10


def test_simulate_decay_and_word_check(example_csls):
    word = [1] * 30  # stay on the self-loop node
    traj = cc.simulate(example_csls, [1.0, 0.5], word)
    assert traj.shape == (31, 2)
    M = np.linalg.matrix_power(example_csls.matrices[0], 30)
    assert np.allclose(traj[-1], M @ np.array([1.0, 0.5]), atol=1e-12)
    assert np.linalg.norm(traj[-1]) < 1e-8  # contracting mode
    with pytest.raises(ValueError):
        cc.simulate(example_csls, [1.0, 0.5], [4, 4])
    with pytest.raises(ValueError):
        cc.simulate(example_csls, [1.0], [1])


def test_sample_set_validation():
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    Y = np.zeros((2, 2))
    U = np.array([0, 1])
    V = np.array([1, 0])
    s = SampleSet(X, Y, U, V, 2, 2, 2, 1)
    assert len(s) == 2
    o = s.observation(1)
    assert o.u == 1 and o.v == 0 and np.array_equal(o.x, [0.0, 1.0])
    assert s.node_pairs() == {(0, 1), (1, 0)}
    with pytest.raises(ValueError):
        SampleSet(2 * X, Y, U, V, 2, 2, 2, 1)  # not unit norm
    with pytest.raises(ValueError):
        SampleSet(X, Y, U, np.array([0, 5]), 2, 2, 2, 1)  # node index range
    with pytest.raises(ValueError):
        SampleSet(X, Y[:1], U, V, 2, 2, 2, 1)  # shape mismatch
    with pytest.raises(ValueError):
        s.prefix(3)


def test_csls_validation(example_csls):
    auto = example_csls.automaton
    with pytest.raises(ValueError):
        cc.Csls(auto, example_csls.matrices[:2], 2)  # one matrix per label
    with pytest.raises(ValueError):
        cc.Csls(auto, tuple(np.eye(3) for _ in range(4)), 2)  # wrong shape
    bad = (np.eye(2), np.eye(2), np.eye(2), np.array([[1.0, np.inf], [0, 1]]))
    with pytest.raises(ValueError):
        cc.Csls(auto, bad, 2)
    with pytest.raises(ValueError):
        example_csls.matrix(0)


def test_sample_csv_round_trip(example_csls, tmp_path):
    s = cc.draw_observations(example_csls, 50, seed=77)
    p = tmp_path / "obs.csv"
    s.to_csv(p)
    back = from_csv(p, s.v_count, s.e_count, s.m)
    assert np.array_equal(back.X, s.X)  # repr round-trips doubles exactly
    assert np.array_equal(back.Y, s.Y)
    assert np.array_equal(back.U, s.U)
    assert np.array_equal(back.V, s.V)
    # writing to a stream gives the same bytes as writing to a path
    buf = io.StringIO()
    s.to_csv(buf)
    assert buf.getvalue() == p.read_bytes().decode()
    with pytest.raises(ValueError):
        from_csv(__file__, s.v_count, s.e_count, s.m)  # not a sample CSV
