"""Fit an arrival model from a few harvest days of gate logs.

The bundled sample data is synthetic but shaped like a real crush pad:
deliveries start mid-morning, peak in the afternoon, and a few stragglers
roll in after midnight.  The calibration folds anything from the final
hour into the last live half-hour bin so the planning day ends cleanly.
"""

from pathlib import Path

from pressplan import calibrate, read_delivery_log, read_variety_totals, write_model
from pressplan.arrivals import log_diagnostics

HERE = Path(__file__).parent
DATA = HERE.parent / "data"

deliveries = read_delivery_log(DATA / "sample_deliveries.csv")
totals = read_variety_totals(DATA / "sample_variety_totals.csv")

print(f"{len(deliveries)} deliveries over {len(deliveries.days())} operating days\n")

print("weekday   days  deliveries  first     last      mean gap")
for name, s in log_diagnostics(deliveries).items():
    gap = f"{s.mean_gap_minutes:.1f} min" if s.mean_gap_minutes is not None else "-"
    print(f"{name:<9} {s.days:>4}  {s.deliveries:>10}  {s.first}  {s.last}  {gap:>8}")

model = calibrate(totals, deliveries)
print(f"\nmean trucks per day: {sum(model.lam):.1f}")
print("variety mix:", " ".join(f"v{v}={p:.2f}" for v, p in enumerate(model.p_variety, start=1)))
print("load mix:   ", " ".join(f"{c}t={p:.2f}" for c, p in zip((5, 10, 15, 20, 25), model.p_weight)))

busiest = max(range(len(model.lam)), key=lambda t: model.lam[t])
h, m = divmod(510 + 30 * busiest, 60)
print(f"busiest half hour starts {h % 24:02d}:{m:02d} with {model.lam[busiest]:.2f} expected trucks")

out = HERE / "out" / "arrival_model.txt"
out.parent.mkdir(exist_ok=True)
write_model(model, out)
print(f"\nmodel written to {out}")
