"""Plan one simulated day with the full press fleet.

Builds the two value tables for the reference arrival model, then walks a
seeded day half hour by half hour: sample deliveries, ask the optimizer
which fills maximize expected payoff to come, execute, age the queue.
"""

import numpy as np

from pressplan import (
    DEFAULT_FLEET,
    QueueState,
    Truck,
    build_tables,
    empty_press,
    reference_model,
    run_model,
    strategy_text,
)
from pressplan.arrivals import sample_interval_arrivals
from pressplan.engine import age_queue, empty_queue

model = reference_model()
tables = build_tables(model)
for pt, table in tables.items():
    print(f"type {pt.name}: expected value of an empty press day = {table.expected_day_value():.1f}")

rng = np.random.default_rng(11)
presses = tuple(empty_press(pt) for pt in DEFAULT_FLEET)
queue = empty_queue(0)
payoff = 0.0
losses = None
next_id = 1
shown = 0

for t in range(model.horizon):
    trucks = list(queue.trucks)
    for v, l in sample_interval_arrivals(model, t, rng):
        trucks.append(Truck(next_id, v, l, arrival=t))
        next_id += 1
    queue = QueueState(tuple(trucks), t)
    result = run_model(presses, queue, t, tables, rng)
    presses, queue = result.presses, result.queue
    payoff += result.income
    if result.rows and shown < 3:
        shown += 1
        h, m = divmod(510 + 30 * t, 60)
        print(f"\n--- {h % 24:02d}:{m:02d}, {len(queue.trucks)} trucks still waiting ---")
        print(strategy_text(t, result.rows), end="")
    queue, charge = age_queue(queue, model.horizon)
    losses = charge if losses is None else losses + charge

print(f"\nday payoff {payoff:.0f}")
print(
    f"losses: degradation {losses.degradation:.0f}, rejection {losses.rejection:.0f}, "
    f"leftover {losses.leftover:.0f}"
)
