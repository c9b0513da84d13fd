"""Execution of probe / skewer / scoop primitives.

The controller commits a velocity command per 20 Hz tick; forces are
integrated and safety events checked at the 1 kHz sensor rate inside each
tick.  A probe descends gently, keeps descending through the 26 ms haptic
acquisition window that opens when the sensed force first crosses the contact
threshold, and freezes at the following tick.  Skewers descend to plate
height unless the wrist sensor hits the force limit first; tilting the fork
amplifies the wrist load of a given contact force by 1/cos^2(beta) and sweeps
the contact point outward along the roll heading, so an angled skewer stalls
early on stiff material (or on a stiff rim hidden under a soft center).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidStartError
from .contact import POST_FRACTURE_PLATEAU, local_stiffness
from .types import (
    ANGLED_SPEED,
    CONTACT_THRESHOLD,
    CONTROL_DT,
    FORCE_LIMIT,
    FORCE_NOISE_STD,
    PLATE_MAX_COMPRESSION,
    PLATE_Z,
    PROBE_SPEED,
    SCOOP_PITCH,
    SENSOR_DT,
    TRACE_LEN,
    VERTICAL_SPEED,
    Action,
    ForkState,
    HapticTrace,
    PlateState,
    Primitive,
)

# Fraction of the commanded descent over which the angled tilt ramps to its
# target; the tilt must engage early so the reduced axial capability (and the
# lateral tine sweep) act before the tines are already deep.
TILT_RAMP_FRACTION = 0.3
SCOOP_PITCH_RATE = 2.0  # rad/s
SUBSTEPS_PER_TICK = round(CONTROL_DT / SENSOR_DT)

STOP_TRAVEL = "travel"
STOP_PLATE = "plate"
STOP_FORCE = "force_limit"
STOP_CONTACT = "contact_hold"
STOP_DONE = "done"


@dataclass
class PrimitiveResult:
    trajectory: list
    trace: HapticTrace | None
    fork: ForkState
    insertion_depth: float
    peak_item_force: float
    peak_sensor_force: float
    contacted_item_id: int | None
    stop_reason: str
    min_z: float


class _Contact:
    """Tracks penetration, fracture state and peak loads for one primitive."""

    def __init__(self, plate: PlateState, x: float, y: float, roll: float, sweep: bool):
        self.plate = plate
        self.base = (x, y)
        self.roll = roll
        self.sweep = sweep
        self.item = plate.item_at((x, y))
        self.fractured = False
        self.peak_item = 0.0
        self.max_pen = 0.0

    def _contact_point(self, pen: float, beta: float) -> tuple:
        if not self.sweep or beta <= 0.0:
            return self.base
        item = self.item
        drift = min(pen, item.height) * math.tan(beta)
        px = self.base[0] + drift * math.cos(self.roll)
        py = self.base[1] + drift * math.sin(self.roll)
        r = item.radial_fraction((px, py))
        if r > 1.0:
            # the tines ride along the rim rather than exiting the footprint
            scale = 1.0 / r
            px = item.center[0] + (px - item.center[0]) * scale
            py = item.center[1] + (py - item.center[1]) * scale
        return (px, py)

    def force(self, z: float, v_down: float, beta: float) -> tuple:
        """Return (item_force, wrist_sensor_force) at tip height ``z``."""
        item = self.item
        total = 0.0
        item_force = 0.0
        if item is not None:
            pen = item.top_z - z
            if pen > 0.0:
                self.max_pen = max(self.max_pen, pen)
                depth = min(pen, item.height)
                mat = item.material
                if self.fractured:
                    item_force = POST_FRACTURE_PLATEAU * mat.fracture_force
                else:
                    point = self._contact_point(pen, beta)
                    k_loc = local_stiffness(item, point)
                    damping = mat.damping * v_down if (v_down > 0.0 and pen <= item.height) else 0.0
                    item_force = k_loc * depth + damping
                    if item_force >= mat.fracture_force:
                        self.fractured = True
                total = item_force + self.plate.plate_stiffness * max(0.0, pen - item.height)
        else:
            total = self.plate.plate_stiffness * max(0.0, self.plate.plate_z - z)
        self.peak_item = max(self.peak_item, item_force)
        sensor = total / max(math.cos(beta) ** 2, 1e-6)
        return item_force, sensor


def _validate_start(plate: PlateState, action: Action) -> None:
    if action.z < plate.plate_z - PLATE_MAX_COMPRESSION:
        raise InvalidStartError("fork start pose below the plate compression limit")
    if action.primitive is Primitive.PROBE:
        # probes approach from free air; skewers may start in contact
        item = plate.item_at((action.x, action.y))
        if item is not None and action.z < item.top_z:
            raise InvalidStartError("probe start pose inside an item")


def execute_primitive(
    plate: PlateState,
    fork: ForkState,
    action: Action,
    rng: np.random.Generator,
    force_noise_std: float = FORCE_NOISE_STD,
) -> PrimitiveResult:
    """Run one primitive and return trajectory, optional haptic trace and fork.

    Deterministic for fixed inputs and rng state.  Sensor noise lands only on
    the recorded haptic trace; control decisions use the physical force.
    """
    _validate_start(plate, action)
    if action.primitive is Primitive.PROBE:
        return _run_probe(plate, fork, action, rng, force_noise_std)
    if action.primitive in (Primitive.VERTICAL_SKEWER, Primitive.ANGLED_SKEWER):
        return _run_skewer(plate, fork, action)
    if action.primitive is Primitive.SCOOP:
        return _run_scoop(plate, fork, action)
    raise ValueError(f"unknown primitive {action.primitive}")


def _traj_point(t, x, y, z, beta, gamma, force) -> dict:
    return {
        "t": round(t, 6),
        "x": round(x, 9),
        "y": round(y, 9),
        "z": round(z, 9),
        "beta": round(beta, 9),
        "gamma": round(gamma, 9),
        "force": round(force, 9),
    }


def _run_probe(plate, fork, action, rng, noise_std) -> PrimitiveResult:
    x, y, z0 = action.x, action.y, action.z
    floor = plate.plate_z - PLATE_MAX_COMPRESSION
    travel_budget = abs(action.dz)
    step = PROBE_SPEED * SENSOR_DT
    contact = _Contact(plate, x, y, action.roll, sweep=False)

    # fast-forward through free air to just above the first surface
    surface = contact.item.top_z if contact.item is not None else plate.plate_z
    n = max(0, int(math.floor((z0 - surface) / step)) - 1)
    z = z0 - n * step

    trajectory = [_traj_point(0.0, x, y, z0, 0.0, action.roll, 0.0)]
    raw_samples: list = []
    onset = None
    stop_reason = STOP_TRAVEL
    min_z = z0
    peak_sensor = 0.0

    while True:
        t = n * SENSOR_DT
        _, sensor = contact.force(z, PROBE_SPEED, 0.0)
        peak_sensor = max(peak_sensor, sensor)
        min_z = min(min_z, z)
        if onset is None and sensor >= CONTACT_THRESHOLD:
            onset = n
        if onset is not None and len(raw_samples) < TRACE_LEN:
            raw_samples.append(sensor)
        if n % SUBSTEPS_PER_TICK == 0 and n > 0:
            trajectory.append(_traj_point(t, x, y, z, 0.0, action.roll, sensor))
        if onset is not None and len(raw_samples) >= TRACE_LEN and n % SUBSTEPS_PER_TICK == 0:
            stop_reason = STOP_CONTACT
            break
        if sensor >= FORCE_LIMIT:
            stop_reason = STOP_FORCE
            break
        if z <= floor + 1e-12:
            stop_reason = STOP_PLATE
            break
        if z0 - z >= travel_budget:
            stop_reason = STOP_TRAVEL
            break
        n += 1
        z = max(z0 - n * step, floor)

    t = n * SENSOR_DT
    _, f_hold = contact.force(z, 0.0, 0.0)
    trajectory.append(_traj_point(t, x, y, z, 0.0, action.roll, f_hold))

    trace = None
    if len(raw_samples) >= TRACE_LEN:
        samples = np.asarray(raw_samples[:TRACE_LEN], dtype=np.float64)
        if noise_std > 0.0:
            samples = samples + rng.normal(0.0, noise_std, size=TRACE_LEN)
        samples = np.clip(samples, 0.0, None)
        trace = HapticTrace(samples=samples, contact_onset_index=0)

    item = contact.item
    insertion = min(contact.max_pen, item.height) if item is not None else 0.0
    new_fork = ForkState(
        position=(x, y, z),
        pitch=0.0,
        roll=action.roll,
        tine_engagement_depth=insertion,
        tines_inserted=fork.tines_inserted,
    )
    return PrimitiveResult(
        trajectory=trajectory,
        trace=trace,
        fork=new_fork,
        insertion_depth=insertion,
        peak_item_force=contact.peak_item,
        peak_sensor_force=peak_sensor,
        contacted_item_id=item.id if item is not None else None,
        stop_reason=stop_reason,
        min_z=min_z,
    )


def _run_skewer(plate, fork, action) -> PrimitiveResult:
    angled = action.primitive is Primitive.ANGLED_SKEWER
    speed = ANGLED_SPEED if angled else VERTICAL_SPEED
    x, y, z0 = action.x, action.y, action.z
    budget = abs(action.dz)
    total_time = budget / speed if budget > 0 else 0.0
    ramp_time = TILT_RAMP_FRACTION * total_time
    step = speed * SENSOR_DT
    contact = _Contact(plate, x, y, action.roll, sweep=angled)

    def beta_at(t: float) -> float:
        if not angled or action.dbeta == 0.0:
            return 0.0
        if ramp_time <= 0.0:
            return action.dbeta
        return action.dbeta * min(1.0, t / ramp_time)

    n = 0
    z = z0
    stop_reason = STOP_TRAVEL
    min_z = z0
    trajectory = []
    peak_sensor = 0.0
    while True:
        t = n * SENSOR_DT
        beta = beta_at(t)
        _, sensor = contact.force(z, speed, beta)
        peak_sensor = max(peak_sensor, sensor)
        min_z = min(min_z, z)
        if n % SUBSTEPS_PER_TICK == 0:
            trajectory.append(_traj_point(t, x, y, z, beta, action.roll, sensor))
        if sensor >= FORCE_LIMIT:
            stop_reason = STOP_FORCE
            break
        if z <= plate.plate_z + 1e-12:
            stop_reason = STOP_PLATE
            break
        if z0 - z >= budget:
            stop_reason = STOP_TRAVEL
            break
        n += 1
        z = max(z0 - n * step, plate.plate_z)

    t = n * SENSOR_DT
    beta = beta_at(t)
    _, f_final = contact.force(z, 0.0, beta)
    trajectory.append(_traj_point(t, x, y, z, beta, action.roll, f_final))

    item = contact.item
    insertion = min(contact.max_pen, item.height) if item is not None else 0.0
    new_fork = ForkState(
        position=(x, y, z),
        pitch=beta,
        roll=action.roll,
        tine_engagement_depth=insertion,
        tines_inserted=fork.tines_inserted,
    )
    return PrimitiveResult(
        trajectory=trajectory,
        trace=None,
        fork=new_fork,
        insertion_depth=insertion,
        peak_item_force=contact.peak_item,
        peak_sensor_force=peak_sensor,
        contacted_item_id=item.id if item is not None else None,
        stop_reason=stop_reason,
        min_z=min_z,
    )


def _run_scoop(plate, fork, action) -> PrimitiveResult:
    # the acquired item rides the fork: compression is released, so the scoop
    # rotates in place and only the pitch trajectory is of interest
    x, y, z = action.x, action.y, action.z
    target = min(fork.pitch + action.dbeta, math.pi / 2)
    t = 0.0
    beta = fork.pitch
    trajectory = [_traj_point(t, x, y, z, beta, action.roll, 0.0)]
    while beta < target - 1e-9:
        t += CONTROL_DT
        beta = min(target, beta + SCOOP_PITCH_RATE * CONTROL_DT)
        trajectory.append(_traj_point(t, x, y, z, beta, action.roll, 0.0))
    new_fork = ForkState(
        position=(x, y, z),
        pitch=beta,
        roll=action.roll,
        tine_engagement_depth=fork.tine_engagement_depth,
        tines_inserted=fork.tines_inserted,
    )
    item = plate.item_at((x, y))
    return PrimitiveResult(
        trajectory=trajectory,
        trace=None,
        fork=new_fork,
        insertion_depth=fork.tine_engagement_depth,
        peak_item_force=0.0,
        peak_sensor_force=0.0,
        contacted_item_id=item.id if item is not None else None,
        stop_reason=STOP_DONE,
        min_z=z,
    )


def probe_action(x: float, y: float, z_start: float, roll: float = 0.0) -> Action:
    """Probe command descending until contact (budgeted to the plate floor)."""
    dz = -(z_start - (PLATE_Z - PLATE_MAX_COMPRESSION))
    return Action(x=x, y=y, z=z_start, dz=dz, roll=roll, dbeta=0.0, primitive=Primitive.PROBE)


def skewer_action(primitive: Primitive, x: float, y: float, z_start: float, roll: float = 0.0) -> Action:
    dbeta = math.radians(65.0) if primitive is Primitive.ANGLED_SKEWER else 0.0
    dz = -max(0.0, z_start - PLATE_Z)
    return Action(x=x, y=y, z=z_start, dz=dz, roll=roll, dbeta=dbeta, primitive=primitive)


def scoop_action(fork: ForkState) -> Action:
    x, y, z = fork.position
    return Action(
        x=x, y=y, z=z, dz=0.0, roll=fork.roll,
        dbeta=max(0.0, SCOOP_PITCH - fork.pitch), primitive=Primitive.SCOOP,
    )
