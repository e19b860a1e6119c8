"""Write every figure preset as CSV into ./figures (or a directory given as argv[1])."""
import sys
from pathlib import Path

from relqfi import FIGURES, figure_config, run_grid, write_table

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(parents=True, exist_ok=True)
for fig_id, (description, *_rest) in FIGURES.items():
    cfg = figure_config(fig_id)
    records = run_grid(cfg)
    path = write_table(records, cfg, out / f"{fig_id}.csv")
    bad = sum(r.error is not None for r in records)
    print(f"{fig_id:6} {len(records):4d} rows, {bad} errors  {description}  -> {path}")
