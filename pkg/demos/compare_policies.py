"""Head-to-head: value-table planner vs first-come-first-served filling.

Runs paired episodes (identical delivery realizations for both policies)
over the scenario grid and prints the per-cell means.  Writes the episode
and aggregate CSVs next to this script.
"""

from pathlib import Path

from pressplan import aggregate_csv, consistent_grid, episode_csv, reference_model, run_grid

EPISODES = 2  # per cell and policy; raise for tighter means

results = run_grid(consistent_grid(), reference_model(), episodes=EPISODES, base_seed=0)

cells: dict[str, dict[str, list[float]]] = {}
for r in results:
    cells.setdefault(r.scenario_id, {}).setdefault(r.policy, []).append(r.payoff)

print(f"{'scenario':<14} {'planner':>9} {'greedy':>9} {'edge':>8}")
for cell_id in sorted(cells):
    dp = sum(cells[cell_id]["dp"]) / EPISODES
    gr = sum(cells[cell_id]["greedy"]) / EPISODES
    print(f"{cell_id:<14} {dp:>9.1f} {gr:>9.1f} {(dp - gr) / gr * 100:>+7.1f}%")

dp_total = sum(r.payoff for r in results if r.policy == "dp")
gr_total = sum(r.payoff for r in results if r.policy == "greedy")
print(f"\naggregate edge over the grid: {(dp_total - gr_total) / gr_total * 100:+.1f}%")

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
(out / "episodes.csv").write_text(episode_csv(results))
(out / "aggregate.csv").write_text(aggregate_csv(results))
print(f"CSVs written to {out}")
