"""Seeded campaigns give identical reports, and any sample can be replayed."""

import os

from alphaproj.fileio import dumps_report
from alphaproj.verify import run_campaign, run_sample

reports = []
for threads in ("0", "4"):
    os.environ["APT_NUM_THREADS"] = threads
    reports.append(dumps_report(run_campaign("derivative", n_samples=50, seed=7)))
print("identical across thread counts:", reports[0] == reports[1])

# Tighten a tolerance so that samples fail, then replay one of them alone.
rep = run_campaign("derivative", n_samples=20, seed=7, tolerances={"derivative_rel_err": 1e-11})
fail = rep["checks"]["derivative_rel_err"]["failing"][0]
print("first failing sample:", fail)
again = run_sample("derivative", fail["seed"], fail["index"], fail["alpha"])
print("replayed metric:     ", again.metrics["derivative_rel_err"])
