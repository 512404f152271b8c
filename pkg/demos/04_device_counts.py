"""
Entropies from device count dictionaries
========================================

Count dictionaries as returned by hardware or simulators, given with
probabilities p = count / shots. Rare bitstrings can be dropped before the
entropies are estimated.
"""

# %%
from pathlib import Path

from rydent import Partition, analyze, parse_counts, truncate

# %%
# A two-qubit dictionary; A is the first qubit.
pair = parse_counts("{'01': 269, '00': 251, '10': 247, '11': 233}")
res = analyze([pair], Partition.of([0], 2))
print(res.raw[0])

# %%
# A 10-atom table (states seen at least ten times out of 1000 shots).
data = Path(__file__).resolve().parent.parent / "tests" / "data"
runs = [parse_counts((data / f"counts_{name}.json").read_text()) for name in ("aquila1", "aquila2")]
for counts in runs:
    kept = truncate(counts)
    print(f"{counts.shots} listed shots, {kept.shots} kept after dropping counts <= 10")

res = analyze(runs, names=["aquila1", "aquila2"])
print(res.to_csv())
