"""First-order convergence in the time step.

Fixes a fine spatial mesh and halves dt repeatedly with T = 0.1; the
domain and boundary L2 errors drop at rates approaching 1, the backward
Euler order.  Level 5 keeps the demo fast; the published study uses level 7:

    dgdyn converge-dt --case example2 --level 7 --dt 0.1 --t-final 0.1 --dt-steps 5
"""

from dgdyn.cli import run_converge_dt
from dgdyn.config import ProblemConfig

print("case example2 (fields of example1, T=0.1), p=1, level 5")
config = ProblemConfig(
    case="example2",
    mode="converge_dt",
    p=1,
    level=5,
    dt=0.1,
    t_final=0.1,
    dt_steps=5,
    fmt="markdown",
).validate()
run_converge_dt(config)
