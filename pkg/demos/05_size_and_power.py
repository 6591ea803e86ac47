"""A small size/power table for the normal mixture design.

R = 300 keeps this under a minute; the acceptance suite runs the same cells
with R = 3000.  Set CATGINI_NUM_WORKERS to spread replicates over processes;
the table does not change.
"""
import sys

from catgini import ExperimentPlan, ScenarioConfig, export_report, run_beta_sweep

plan = ExperimentPlan(
    scenario=ScenarioConfig(design="ex1a", dims=(1, 1), class_sizes=(40, 40, 40)),
    beta_grid=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
    replications=300,
    methods=("asN", "bootstrap"),
    bootstrap_b=200,
    seed=5,
)
report = run_beta_sweep(plan)
sys.stdout.write(export_report(report, "-", "markdown"))
