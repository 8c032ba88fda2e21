"""
Trimming a near-expander
========================

A 4-clique core with a dead-end pair {4, 5} hanging off it, plus a vertex
6 whose only witness path runs into 4.  A witness routes flow through the
pair and out of A via vertex 7.  Trimming first removes the pair (the
"out" instance gets stuck there), which then exposes 6 to the "in"
instance in a second batch.
"""

from fractions import Fraction

from exdec import Graph, trim
from exdec.flow import decompose_flow
from exdec.graph import regularized_weighting
from exdec.trim import verify_certified_expander
from exdec.witness import RoutedBatch, build_witness

edges = [(u, v, 4) for u in range(4) for v in range(4) if u != v]
edges += [(0, 4, 1), (4, 5, 1), (5, 7, 1), (7, 1, 1), (6, 4, 1), (6, 0, 1)]
G = Graph(8, edges)


def routed(r, arcs, amount):
    """One witness round routing ``amount`` along the given arcs."""
    flow = [amount if (u, v) in arcs else 0 for u, v, _ in G.edges]
    dec = decompose_flow(G, flow)
    return RoutedBatch(r, G, dec.transcript, [(p.src, p.dst) for p in dec.paths],
                       [p.amount for p in dec.paths], 1, flow, [p.edges for p in dec.paths])


w = build_witness([routed(0, {(4, 5), (5, 7), (7, 1)}, 10), routed(1, {(6, 4)}, 2)],
                  G.n, Fraction(1, 10), 2)
d = regularized_weighting(G)

# c0 is the early-termination constant; a tiny value lets trimming run to the end
out = trim(G, range(7), w, d, Fraction(1, 10), c0=Fraction(1, 10 ** 9), check=True)

for c in out.cuts:
    print(f"batch {c.batch}: removed {sorted(c.cert.S)} ({c.direction} instance), "
          f"conductance {c.cert.value}")
for b in out.batches:
    print(f"batch {b.round}: unabsorbed {b.unabsorbed}, shrink {b.shrink}")

print(out.tag, sorted(out.A_prime), "phi' =", out.certified_phi)

###############################################################################
# Small enough to check every cut of the survivor.

print("exhaustive check:", verify_certified_expander(G, out.A_prime, out.certified_phi, d))
