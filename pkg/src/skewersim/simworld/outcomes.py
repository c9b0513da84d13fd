"""Attempt outcome resolution and the failure taxonomy."""

from __future__ import annotations

import math

import numpy as np

from .types import SOFT_MAX_STIFFNESS, ComplianceClass, FailureMode, FoodItem, Primitive, TrialOutcome

BASELINE_SLIP = 0.05


def sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def slip_probability(item: FoodItem, primitive: Primitive) -> float:
    """Chance the item slides off the fork after a completed skewer.

    Vertically skewered soft items slip with probability rising in softness;
    everything else carries a small baseline.
    """
    mat = item.material
    if primitive is Primitive.VERTICAL_SKEWER and mat.compliance_class is ComplianceClass.SOFT:
        softness = min(max(1.0 - mat.stiffness / SOFT_MAX_STIFFNESS, 0.0), 1.0)
        return sigmoid(4.0 * (softness - 0.5))
    return BASELINE_SLIP


def tines_from_offset(final_offset: float, minor_axis: float) -> int:
    if final_offset <= minor_axis / 4.0:
        return 4
    if final_offset <= minor_axis / 2.0:
        return 2
    return 0


def resolve_outcome(
    item: FoodItem,
    primitive: Primitive,
    insertion_depth: float,
    peak_force: float,
    final_offset: float,
    rng: np.random.Generator,
    slip_enabled: bool = True,
) -> TrialOutcome:
    """Classify one completed skewer-and-scoop attempt.

    Total function: every input combination maps to exactly one outcome, and
    loss == 0 iff the failure mode is NONE.
    """
    mat = item.material
    tines = tines_from_offset(final_offset, item.minor_axis)

    def fail(mode: FailureMode) -> TrialOutcome:
        return TrialOutcome(
            loss=1,
            failure_mode=mode,
            peak_force=peak_force,
            insertion_depth=insertion_depth,
            tines_inserted=tines,
        )

    if insertion_depth < mat.pierce_depth or tines < 2:
        return fail(FailureMode.MISS)
    if mat.compliance_class is ComplianceClass.SOFT and peak_force > mat.fracture_force:
        return fail(FailureMode.DAMAGE)
    p_slip = slip_probability(item, primitive) if slip_enabled else 0.0
    if rng.uniform() < p_slip:
        return fail(FailureMode.DROP_AFTER_SKEWER)
    if tines == 2:
        return fail(FailureMode.UNSTABLE)
    return TrialOutcome(
        loss=0,
        failure_mode=FailureMode.NONE,
        peak_force=peak_force,
        insertion_depth=insertion_depth,
        tines_inserted=tines,
    )
