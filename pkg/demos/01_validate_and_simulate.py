#!/usr/bin/env python3
"""Load the bundled switching system, check its structure, and watch a few
admissible trajectories contract.

The bundled file describes a two-dimensional plant under four feedback
modes; a four-node graph dictates which mode may follow which.  Stability
of every single mode says nothing yet -- the point of the whole package is
to bound the worst case over all admissible switching sequences.
"""

import numpy as np

import cslscert as cc

csls = cc.parse_system_config(cc.bundled_example_path())
auto = csls.automaton

report = cc.validate(auto)
print(f"structurally valid: {report.ok}")
print(f"nodes: {auto.nodes}")
print(f"modes: {auto.label_count}, edges: {auto.edge_count}")
for (u, v, l) in auto.edges:
    print(f"  {u} --[{l}]--> {v}")

print("\nmode matrices (rows):")
for l in range(1, auto.label_count + 1):
    print(f"  A_{l} = {csls.matrix(l).tolist()}")

# A few admissible words.  Word acceptance is a path condition: the label
# sequence must be spellable by consecutive edges.
words = {
    "stay on the self-loop": [1] * 12,
    "alternate two modes": [2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1],
    "worst known cycle mix": [4, 1, 4, 1, 2, 3, 1, 4, 1, 4, 1, 2],
}
x0 = np.array([1.0, 0.0])
print(f"\ntrajectories from x0 = {x0.tolist()}:")
for name, word in words.items():
    if not cc.accepts_word(auto, word):
        print(f"  {name}: word rejected by the graph")
        continue
    traj = cc.simulate(csls, x0, word)
    norms = np.linalg.norm(traj, axis=1)
    print(f"  {name}: |x_0| = {norms[0]:.3f} -> |x_12| = {norms[-1]:.5f}")

# An inadmissible word: mode 4 exits the hub and only mode 1 returns.
bad = [4, 4]
print(f"\nword {bad} accepted? {cc.accepts_word(auto, bad)}")
