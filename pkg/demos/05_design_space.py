"""Joining accuracy with cost, filtering by budget, extracting the front."""
# %%
from approxradar import dse

costs = dse.reference_costs()
rows = dse.reference_accuracy()
for c in costs:
    print(f"{c.pair_name:>24} {c.area_mm2:7.4f} mm2 {c.power_mw:7.2f} mW  {c.source}")

area, power = dse.savings_summary(costs)
print(f"mean savings vs baseline: area {area:.1f}%, power {power:.1f}%")

# %%
points = dse.join_costs(rows, costs)
budget = dse.Constraints(max_power_mw=300)
print("< 300 mW:", [p.pair_name for p in dse.filter_constraints(points, budget)])
tight = dse.Constraints(max_power_mw=300, max_dev_m=2.3)
print("< 300 mW and < 2.3 m:", [p.pair_name for p in dse.filter_constraints(points, tight)])

# %%
for p in dse.pareto_front(points):
    print("front:", p.pair_name, p.objectives())

# %%
print(dse.design_points_json(points, tight))
