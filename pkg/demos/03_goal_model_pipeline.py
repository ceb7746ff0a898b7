"""
Deriving the adaptive goal model, step by step
==============================================

The crossing controller starts as an ordinary goal tree.  Uncertainty
sources are attached to the tasks they threaten, the affected tasks are
promoted to adaptive goals, and each adaptive goal is refined with a
monitor/analyze/plan/execute loop.  Components uncertainty then lands on
the flow monitor itself, which is promoted and refined in turn.
"""

from redapt.goalmodel import model_to_json
from redapt.hrcs.fixture import (
    ILLUMINANCE,
    SENSOR_FAILURE,
    SENSOR_NOISE,
    VEHICLE_FLOW,
    derive_goal_model,
    initial_model,
)

model = initial_model()
print("initial tree:")
for node in model.nodes:
    parent = model.parent_of(node.id)
    print(f"  {node.id:4} {node.kind.value:14} {node.name}" + (f"  (under {parent})" if parent else ""))

print("\nuncertainty inventory:")
for source in (VEHICLE_FLOW, ILLUMINANCE, SENSOR_FAILURE, SENSOR_NOISE):
    print(f"  {source.id:6} {source.category.value:10} {source.violation_kind.value:3}  {source.name}")

refined = derive_goal_model()
print("\nafter attachment, promotion and MAPE refinement:")
for d in refined.decompositions:
    print(f"  {d.parent} -[{d.mode.value}]-> {', '.join(d.children)}")
print("affect links:")
for link in refined.affects:
    print(f"  {link.source} --{link.label.value}--> {link.target}")

print("\nstructural validation:", refined.validate() or "clean")

# the canonical JSON form round-trips byte for byte
text = model_to_json(refined)
print(f"serialized model: {len(text.splitlines())} lines of canonical JSON")
