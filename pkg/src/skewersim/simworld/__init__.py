"""Plate/food/fork world model and primitive execution."""

from .contact import POST_FRACTURE_PLATEAU, contact_force, local_stiffness, plate_force
from .items import (
    DEFAULT_ARCHETYPES,
    TAG_HETEROGENEOUS,
    TAG_MISLEADING,
    TAG_THIN_PLATE,
    PlateSpec,
    dump_archetype_table,
    load_archetype_table,
    sample_item,
    spawn_plate,
)
from .outcomes import resolve_outcome, sigmoid, slip_probability, tines_from_offset
from .primitives import (
    STOP_CONTACT,
    STOP_DONE,
    STOP_FORCE,
    STOP_PLATE,
    STOP_TRAVEL,
    PrimitiveResult,
    execute_primitive,
    probe_action,
    scoop_action,
    skewer_action,
)
from .types import (
    ANGLED_SPEED,
    ANGLED_TILT,
    APPROACH_HEIGHT,
    CONTACT_THRESHOLD,
    CONTROL_DT,
    FORCE_LIMIT,
    FORCE_NOISE_STD,
    PLATE_MAX_COMPRESSION,
    PLATE_STIFFNESS,
    PLATE_Z,
    PROBE_SPEED,
    SCOOP_PITCH,
    SENSOR_DT,
    TRACE_LEN,
    VERTICAL_SPEED,
    Action,
    Appearance,
    ComplianceClass,
    FailureMode,
    FoodItem,
    ForkState,
    HapticTrace,
    MaterialProfile,
    PlateState,
    Primitive,
    TrialOutcome,
    remove_item,
)

__all__ = [name for name in dir() if not name.startswith("_")]
