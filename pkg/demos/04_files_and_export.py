"""
Network files, MATPOWER cases and MPS export
============================================
"""

# %%
import tempfile
from pathlib import Path

from flexdesign import build_scenario_program, draw_samples, load_case
from flexdesign.io import (
    case_text, matpower_to_network, parse_matpower_case, parse_network_file, serialize_network,
)
from flexdesign.mps import from_mps, to_mps

# %% Network files round-trip to a canonical form
text = case_text("three-node.flexnet")
cfg = parse_network_file(text)
print(serialize_network(cfg))

# %% A MATPOWER case keeps only demands, generator limits and topology
net = matpower_to_network(parse_matpower_case(case_text("case14.m")))
print(f"{net.n_nodes} buses, {net.n_arcs} branches, {net.n_suppliers} generators, {net.n_theta} loads")

# %% The scenario program can be handed to any MPS-reading solver
samples = draw_samples(cfg.spec, 20, seed=1)
prog = build_scenario_program(cfg.net, samples, "mip", eps=2.0)
mps = to_mps(prog.mip)
out = Path(tempfile.gettempdir()) / "three_node.mps"
out.write_text(mps)
back = from_mps(mps)
print(f"wrote {out}: {back.base.n_vars} columns, {back.base.n_rows} rows, {back.binaries.size} binaries")
