"""Scripted derivation of the crossing-control goal model.

The pipeline builds the model in six steps: the initial goal tree with its
adaptive tasks, the uncertainty inventory, attachment of context uncertainty
and promotion of the affected tasks, their MAPE refinement, attachment of
components uncertainty to the flow monitor, and the monitor's own promotion
and refinement.
"""

from __future__ import annotations

from ..goalmodel import (
    ContributionPolarity,
    DecompositionMode,
    GoalModel,
    GoalNode,
    NodeKind,
    UncertaintyCategory,
    UncertaintySource,
    ViolationKind,
)

ROOT = "g1"
SAFETY_SOFTGOAL = "sg2"
PASS_SOFTGOAL = "sg3"
DISPATCH_TASK = "At1"
GATE_TASK = "At2"
FLOW_MONITOR = "M1"

VEHICLE_FLOW = UncertaintySource(
    "ConU1", "Vehicle Flow", UncertaintyCategory.CONTEXT, ViolationKind.FR
)
ILLUMINANCE = UncertaintySource(
    "ConU2", "Illuminance", UncertaintyCategory.CONTEXT, ViolationKind.NFR
)
SENSOR_FAILURE = UncertaintySource(
    "ComU1", "Sensor Failure", UncertaintyCategory.COMPONENTS, ViolationKind.FR
)
SENSOR_NOISE = UncertaintySource(
    "ComU2", "Sensor Noise", UncertaintyCategory.COMPONENTS, ViolationKind.NFR
)


def initial_model() -> GoalModel:
    """Step 1: the requirements tree with the two adaptive tasks."""
    model = GoalModel()
    model = model.add_node(GoalNode(ROOT, "Control the highway-rail crossing", NodeKind.GOAL))
    model = model.add_node(
        GoalNode(SAFETY_SOFTGOAL, "Maintain safety efficiency", NodeKind.SOFTGOAL)
    )
    model = model.add_node(
        GoalNode(PASS_SOFTGOAL, "Maintain pass efficiency", NodeKind.SOFTGOAL)
    )
    model = model.add_node(
        GoalNode(
            DISPATCH_TASK,
            "Determine the dispatch interval from vehicle flow",
            NodeKind.ADAPTIVE_TASK,
            agent="train dispatch end",
        )
    )
    model = model.add_node(
        GoalNode(
            GATE_TASK,
            "Set gate close and open intervals from illuminance",
            NodeKind.ADAPTIVE_TASK,
            agent="gate control end",
        )
    )
    model = model.decompose(ROOT, (DISPATCH_TASK, GATE_TASK), DecompositionMode.AND)
    model = model.add_contribution(DISPATCH_TASK, PASS_SOFTGOAL, ContributionPolarity.HELP)
    model = model.add_contribution(GATE_TASK, SAFETY_SOFTGOAL, ContributionPolarity.HELP)
    model = model.add_contribution(GATE_TASK, PASS_SOFTGOAL, ContributionPolarity.HURT)
    return model


def derive_goal_model() -> GoalModel:
    """Steps 1-6: the fully refined adaptive goal model."""
    model = initial_model()

    # context uncertainty is attached to the adaptive tasks, which are then
    # promoted to adaptive goals and refined with MAPE loops
    model = model.attach_uncertainty(VEHICLE_FLOW, DISPATCH_TASK)
    model = model.attach_uncertainty(ILLUMINANCE, GATE_TASK)
    model = model.promote_to_adaptive_goal(DISPATCH_TASK)
    model = model.promote_to_adaptive_goal(GATE_TASK)
    model = model.refine_with_mape(
        DISPATCH_TASK,
        (
            "Gauge f_i by infrared sensors",
            "Verify p and n at runtime",
            "Decide t_dispatch to hold p and n",
            "Apply dispatch interval",
        ),
        ids=("M1", "A1", "P1", "E1"),
    )
    model = model.refine_with_mape(
        GATE_TASK,
        (
            "Gauge e_i by illuminance sensors",
            "Verify safety utility at runtime",
            "Retime gate close and open intervals",
            "Apply gate intervals",
        ),
        ids=("M2", "A2", "P2", "E2"),
    )

    # components uncertainty lands on the flow monitor, which is promoted in
    # turn and refined with its own replacement loop
    model = model.attach_uncertainty(SENSOR_FAILURE, FLOW_MONITOR)
    model = model.attach_uncertainty(SENSOR_NOISE, FLOW_MONITOR)
    model = model.promote_to_adaptive_goal(FLOW_MONITOR)
    model = model.refine_with_mape(
        FLOW_MONITOR,
        (
            "Monitor sensor health",
            "Detect failed or noisy sensors",
            "Select standby sensors",
            "Replace sensors",
        ),
        ids=("M3", "A3", "P3", "E3"),
    )
    return model
