"""Spatial convergence of the backward Euler / DG scheme.

Reproduces the structure of the published convergence study for the
periodic test case u = exp(-10 t) (1 - cos(2 pi x)) cos(4 pi y): final-time
L2 errors in the domain and on the dynamic boundary, plus the accumulated
energy error (dt * sum_k |||e^k|||^2)^(1/2), with their rates.  Levels are
capped at 4 here to keep the demo quick; pass levels 2..7 through the CLI
to match the published range:

    dgdyn converge-h --case example1 --p 1 --levels 2..7 --dt 1e-5 --t-final 1e-3
"""

from dgdyn.cli import run_converge_h
from dgdyn.config import ProblemConfig

for p in (1, 2):
    print(f"\ncase example1, p={p}, dt=1e-5, T=1e-3, gamma=10 (sigma = gamma/h)")
    config = ProblemConfig(
        case="example1",
        mode="converge_h",
        p=p,
        levels=(2, 3, 4),
        dt=1e-5,
        t_final=1e-3,
        fmt="markdown",
    ).validate()
    run_converge_h(config)
