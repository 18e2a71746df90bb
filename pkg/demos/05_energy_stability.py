"""Unconditional energy stability of the implicit scheme.

With the sources turned off, each backward Euler step contracts the
lambda-weighted L2 norm regardless of the time step: the solve
(M + dt A) u+ = M u with A positive semidefinite cannot increase the
M-norm.  The run logs k, t_k and the norm and raises on any increase.
"""

from dgdyn.cli import run_stability
from dgdyn.config import ProblemConfig

print("zero-source decay from the example1 initial datum (big dt on purpose)")
config = ProblemConfig(
    case="example1",
    mode="stability",
    p=1,
    level=3,
    dt=5e-3,
    t_final=5e-2,
    fmt="markdown",
).validate()
rows = run_stability(config)
drop = rows[-1][2] / rows[0][2]
print(f"\nnorm ratio over the run: {drop:.4f} (monotone non-increasing, checked per step)")
