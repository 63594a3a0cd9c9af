"""
Choosing the penalty by BIC
===========================

``run_sweep`` fits one replicate on every grid value and scores each fit by
``m ln(mse) + dof ln(m)``. The path is written as CSV.
"""
from aglnet.harness import ExperimentConfig, run_sweep
from aglnet.selection import write_path_csv

cfg = ExperimentConfig(
    target="lorenz_rhs_25",
    lambda_grid=(1.0, 0.3, 0.1, 0.03),
    iter_max=2000,
    epoch_max=1000,
)
result = run_sweep(cfg, method="adaptive_gl", replicate=0)
for rec in result.path:
    print(f"lam={rec.lam:<5} |S|={rec.support_size:2d} mse={rec.mse:.5f} dof={rec.dof} bic={rec.bic:.1f}")
print("chosen", result.chosen_lambda, sorted(result.chosen.support))
write_path_csv(result.path, "bic_path.csv")
