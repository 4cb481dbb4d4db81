"""Classical baselines for spin-model optimization and Simon's problem.

Subpackages cover problem containers (:mod:`spinbench.model`), heavy-hex
HUBO instance generation (:mod:`spinbench.generator`), the discrete
simulated bifurcation and simulated annealing solvers (:mod:`spinbench.sbm`,
:mod:`spinbench.sa`), time-to-epsilon metrics (:mod:`spinbench.metrics`),
a classical Simon's-problem toolkit (:mod:`spinbench.simon`), and the
experiment harness (:mod:`spinbench.bench`).
"""

__version__ = "0.1.0"
