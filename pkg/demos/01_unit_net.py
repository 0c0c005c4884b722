"""
Flexibility of a one-node network
=================================

A single supplier of capacity 1 feeds one uncertain demand.  We measure how
often the network copes with three demand levels, then buy capacity.
"""

# %%
import numpy as np

from flexdesign import (
    DesignVector, SampleSet, build_scenario_program, estimate_sf, load_case, psi,
    solve_design_continuous, solve_design_mip,
)

cfg = load_case("unit-net")
net = cfg.net
samples = SampleSet.from_values([[0.5], [1.5], [2.5]])

# %% The feasibility function is negative inside the operating region
zero = DesignVector.zeros(net)
for theta in samples.samples:
    print(f"theta={theta[0]:.1f}  psi={psi(net, zero, theta).psi:+.2f}")
print("sample flexibility of the zero design:", estimate_sf(net, zero, samples).value)

# %% Best design for a few budgets, exact and relaxed
for eps in (0.0, 0.4, 0.5, 1.5):
    exact = solve_design_mip(build_scenario_program(net, samples, "mip", eps=eps))
    relaxed, y_frac = solve_design_continuous(build_scenario_program(net, samples, "cont", eps=eps))
    print(f"eps={eps:3.1f}  exact SF={exact.sf:.3f}  relaxed SF={relaxed.sf:.3f}  "
          f"expansion={exact.design.supplier[0]:.3f}  relaxed y={np.round(y_frac, 5)}")
