"""
Density and contribution on a toy log
=====================================

Eight cases, two attributes, one fixed split into two clusters. Numbers are
small enough to check by hand.
"""
import numpy as np

import flowareas as fa
from flowareas.clustering import ClusterModel, ClusteringSuite

traces = [list("ABC"), list("ABC"), list("ABC"), list("AC"),
          list("ADC"), list("ADC"), list("ADDC"), list("ABC")]
types = ["std", "std", "std", "std", "cons", "cons", "cons", "std"]
plants = ["p1", "p2", "p1", "p2", "p1", "p2", "p1", "p2"]
cases = [fa.Case(f"c{i}", [fa.Event(a) for a in t], {"type": ty, "plant": pl})
         for i, (t, ty, pl) in enumerate(zip(traces, types, plants))]
log = fa.EventLog(cases)

# cases 4..6 form cluster 1
labels = np.array([0, 0, 0, 0, 1, 1, 1, 0])
model = ClusterModel(2, np.zeros((2, 1), dtype=np.uint8), labels, 0, 0, 0)
suite = ClusteringSuite((model,), (2,), 0, "toy", log.case_ids)

result = fa.analyze(fa.derive_dimensions(log), suite)
for p in (0, 1):
    print(f"cluster {p} ({model.sizes[p]} cases)")
    for s in result.cluster_table(0, p, top_n=None):
        print(f"  {s.area.label:12s} cluster {s.cluster_density:.3f} "
              f"total {s.total_density:.3f} contribution {s.contribution:+.3f}")

# type=cons fills cluster 1 exactly: score = w * (1 - d)^2 with w = d = 3/8
for row in fa.rank_areas(result.area_rows()):
    print(f"{row.area.label:12s} {row.business_area_contribution:.4f}")
print("closed form for type=cons:", 3 / 8 * (1 - 3 / 8) ** 2)

for row in fa.rank_attributes(result.attribute_rows()):
    print(row.attribute, round(row.case_attribute_contribution, 4))
