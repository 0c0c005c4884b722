"""Regenerate the synthetic 141-bus radial feeder bundled as ``case141.m``.

The feeder has one substation generator at bus 1, 140 branches forming a
tree and 84 load buses.  Only the quantities the design model reads are
meaningful (topology, ``Pd``, ``Pmax``).

    python scripts/make_case141.py > src/flexdesign/cases/case141.m
"""

import numpy as np

N_BUS, N_LOAD, PMAX, SEED = 141, 84, 200.0, 141


def build(seed=SEED):
    rng = np.random.default_rng(seed)
    parent = {}
    for b in range(2, N_BUS + 1):
        # mostly extend the current lateral, sometimes branch off earlier
        if b == 2 or rng.random() < 0.7:
            parent[b] = b - 1
        else:
            parent[b] = int(rng.integers(max(1, b - 12), b - 1))
    loads = np.sort(rng.choice(np.arange(2, N_BUS + 1), size=N_LOAD, replace=False))
    pd = {int(b): round(float(rng.uniform(0.05, 0.6)), 3) for b in loads}
    return parent, pd


def main():
    parent, pd = build()
    out = [
        "function mpc = case141",
        "%CASE141    Synthetic 141-bus radial distribution feeder.",
        f"%   Generated by scripts/make_case141.py (seed {SEED}).  One substation",
        "%   generator at bus 1, 140 branches, 84 load buses.  Only Pd, Pmax",
        "%   and the branch endpoints are meaningful.",
        "",
        "mpc.version = '2';",
        "mpc.baseMVA = 10;",
        "",
        "%% bus data",
        "%\tbus_i\ttype\tPd\tQd",
        "mpc.bus = [",
    ]
    for b in range(1, N_BUS + 1):
        kind = 3 if b == 1 else 1
        p = pd.get(b, 0)
        out.append(f"\t{b}\t{kind}\t{p:g}\t{0.6 * p:.4g};")
    out += ["];", "", "%% generator data",
            "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin",
            "mpc.gen = [", f"\t1\t0\t0\t999\t-999\t1\t10\t1\t{PMAX:g}\t0;", "];", "",
            "%% branch data", "%\tfbus\ttbus", "mpc.branch = ["]
    for b in range(2, N_BUS + 1):
        out.append(f"\t{parent[b]}\t{b};")
    out.append("];")
    print("\n".join(out))


if __name__ == "__main__":
    main()
