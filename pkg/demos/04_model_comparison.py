"""Fit all three models to one dataset and see where each one errs.

Writes pairwise and deviation heatmaps (CSV and SVG) to demos/output/.
Pass a SOC or CSV file as the first argument to use your own rankings.
"""
import sys
from pathlib import Path

import numpy as np

from rankagg import (Dataset, MCEMConfig, NormalRUMParams, compare_models, heatmap_emit,
                     load_dataset, sample_normal_rum)

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

if len(sys.argv) > 1:
    data = load_dataset(sys.argv[1])
else:
    # uneven spreads make this data awkward for the single-dispersion models
    truth = NormalRUMParams(np.linspace(0, -2.4, 7), [1, .4, 1.8, .5, 1.2, .3, 2.0])
    data = Dataset(sample_normal_rum(truth, 2000, seed=3), tuple("ABCDEFG"))

reports = compare_models(data, seed=0, draws=3000, mcem=MCEMConfig(max_em_iters=40))

print(f"{'model':8s} {'nll':>10s} {'se':>6s} {'mean|dev|':>10s} {'max|dev|':>9s}  modal ordering")
for rep in reports:
    se = "-" if rep.nll_se is None else f"{rep.nll_se:.2f}"
    modal = " ".join(data.labels[j] for j in rep.modal_ordering)
    print(f"{rep.model_name:8s} {rep.nll:10.1f} {se:>6s} {rep.mean_abs_deviation:10.4f} "
          f"{rep.max_abs_deviation:9.4f}  {modal}")

for rep in reports:
    for what, mat in (("pairwise", rep.pairwise.p), ("deviation", rep.deviation)):
        for fmt in ("csv", "svg"):
            heatmap_emit(mat, rep.display_ordering, data.labels,
                         out / f"{rep.model_name}_{what}.{fmt}", format=fmt,
                         title=f"{rep.model_name} {what}")
heatmap_emit(reports[0].empirical.p, reports[-1].display_ordering, data.labels,
             out / "empirical.svg", format="svg", title="empirical")
print("\nheatmaps written to", out)
