#!/usr/bin/env python3
"""The distributed proof, built centrally and attacked.

The labeler decomposes a spanning tree by recursive centers; the verifier is
one-round local. A minimal tree's labels are accepted everywhere, a
non-minimal tree is betrayed by the light edge across some separation level,
and single-bit label mutations trip a rejection.
"""

from stabspan import (find_center, generate, kruskal, milestone_set,
                      reference_label, transform, verify_all)
from stabspan.certificate import CertificateLabel, LevelRecord
from stabspan.oracle import spanning_trees, tree_weight

g = generate("random_connected", 9, "uniform_1_to_n", 4)
ms = milestone_set(g.n, 1)
fn = lambda w: transform(w, ms)

mst = kruskal(g, fn).edges
adj = {v: [] for v in g.nodes}
for u, v in mst:
    adj[u].append(v)
    adj[v].append(u)
print(f"n={g.n}, tree={mst}")
print(f"level-0 center of the tree: {find_center(adj, set(g.nodes))}\n")

labels = reference_label(g, mst, ms)
print("minimal tree labeled:", "accepted everywhere"
      if not verify_all(labels, g, ms) else "REJECTED?!")

worst = max(spanning_trees(g), key=lambda t: tree_weight(g, t, fn))
bad = reference_label(g, worst, ms)
rej = verify_all(bad, g, ms)
print(f"heaviest spanning tree labeled: rejected at nodes {sorted(rej)}")

v = g.nodes[2]
lab = labels[v]
mutated = dict(labels)
flipped = (LevelRecord(lab.levels[0].subtree_number,
                       lab.levels[0].maxw_index ^ 1,
                       lab.levels[0].orient,
                       lab.levels[0].dmod),) + lab.levels[1:]
mutated[v] = CertificateLabel(lab.orient_parent, lab.desc_count,
                              lab.total_n, flipped)
print(f"one flipped weight bit at node {v}: rejected at "
      f"{sorted(verify_all(mutated, g, ms)) or 'nowhere (flip was harmless)'}")

print(f"\nper-node stack depths: "
      f"{sorted(len(labels[v].levels) for v in g.nodes)} "
      f"(cap floor(log2 {g.n}) + 1 = {(g.n.bit_length() - 1) + 1})")
