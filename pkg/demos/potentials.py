"""
Watching the cut-matching potential decay
=========================================

On a bidirected clique the cut player never finds a sparse cut, so every
round only mixes the flow matrix.  The row potential psi and the column
potential psi_rev measure how far the rows and columns are from uniform;
both should drop by orders of magnitude over T rounds.
"""

from fractions import Fraction

from exdec import Graph, potential_trace, run_cut_matching
from exdec.graph import regularized_weighting

n = 12
G = Graph(n, [(u, v, 1) for u in range(n) for v in range(n) if u != v])
d = regularized_weighting(G)

out = run_cut_matching(G, d, Fraction(1, 50), seed=0)  # default c_T = 10
print(out.tag, "after", out.rounds_run, "of", out.T, "rounds")

trace = potential_trace(out)
psi0 = trace[0][1]
for t, psi, psi_rev in trace[:: max(1, len(trace) // 12)]:
    print(f"t={t:4d}  psi/psi0={psi / psi0:.3e}  psi_rev/psi0={psi_rev / psi0:.3e}")

###############################################################################
# The clique is symmetric, so psi and psi_rev fall together.  The flat tail
# near 1e-33 is the floating-point floor of the trace, not a stall.
# Plot on a log scale when matplotlib is around.

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    ts = [t for t, _, _ in trace]
    plt.semilogy(ts, [p / psi0 for _, p, _ in trace], label="psi")
    plt.semilogy(ts, [q / psi0 for _, _, q in trace], label="psi_rev")
    plt.xlabel("round")
    plt.legend()
    plt.savefig("potentials.png", dpi=100)
    print("wrote potentials.png")
