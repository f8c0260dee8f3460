"""Inside the delivery simulator: demand, queues, and the value of replication.

One day of orders arrives from an inhomogeneous arrival process, each order
is served by the closest warehouse's truck fleet, and the objective is the
fraction delivered within the deadline. Single days are noisy; averaging
independent days trades evaluation cost for precision, which is exactly the
tension the optimizers negotiate.
"""

import io

import numpy as np

from bosh.benchmarks import (
    WarehouseConfig,
    poisson_order_stream,
    simulate_day,
    warehouse_simulate,
    warehouse_true,
)

good = WarehouseConfig.from_vector([0.25, 0.7, 0.75, 0.3])   # near the demand clusters
bad = WarehouseConfig.from_vector([0.5, 0.5, 0.52, 0.5])     # stacked in the middle

orders = poisson_order_stream(42)
print(f"one simulated day: {len(orders)} orders, first at t={orders[0][0]:.1f} min")

for name, config in (("clustered", good), ("stacked", bad)):
    result = simulate_day(config, orders)
    print(
        f"  {name:9s} locations: {result.on_time} on time, {result.late} late, "
        f"{result.undelivered} undelivered -> rho {result.on_time / result.total:.3f}"
    )

print("\nsingle-day estimates vs multi-day averages (clustered locations):")
singles = [warehouse_simulate(good, 1, seed) for seed in range(12)]
print(f"  twelve 1-day estimates: {np.round(singles, 3)}")
for days in (1, 5, 20):
    pooled = warehouse_simulate(good, days, seed=123)
    print(f"  {days:2d}-day estimate (seed 123): {pooled:.3f}")
print(f"  reserved 100-day truth oracle: {warehouse_true(good):.3f}")

log = io.StringIO()
warehouse_simulate(good, 1, seed=7, event_log=log)
lines = log.getvalue().splitlines()
print(f"\nevent log (first 3 of {len(lines)} orders):")
print("  day,time,x,y,warehouse,wait,travel,on_time")
for line in lines[:3]:
    print(f"  {line}")
