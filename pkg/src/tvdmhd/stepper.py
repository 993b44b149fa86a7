"""Full time-step cycle: one CFL evaluation, sweeps x y z z y x, 4 transposes.

Each directional leg applies the fluid sweep then the magnetic sweep along the
current fastest axis for the same dt; the reversed second half symmetrizes the
splitting, so one cycle advances physical time by 2 dt.  The z leg repeats
without a transpose, and the two reverse-leg transposes run the inverse cyclic
permutation, which returns the grid to canonical orientation with exactly four
memory transposes per cycle.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .fluid import cfl_timestep, fluid_sweep
from .grid import CANONICAL, ConservedState, SchemeParams, transpose
from .magnetic import magnetic_sweep

SWEEP_AXES = ("x", "y", "z", "z", "y", "x")


@dataclass
class StepReport:
    """Timing and function census of one cycle."""

    dt: float
    wall_ms: float
    census: dict[str, int]
    axes: tuple[str, ...] = SWEEP_AXES
    sections: dict[str, float] = field(default_factory=dict)


def step_cycle(state: ConservedState, params: SchemeParams,
               workers: int = 1) -> StepReport:
    """Advance the state by one full cycle (2 dt); returns the cycle report.

    On a sweep error the state is left partially updated and must be treated
    as invalid.
    """
    if tuple(state.shape.orientation) != CANONICAL:
        raise ValueError(f"step cycle requires canonical orientation, got {state.shape.orientation}")

    census = {"cfl": 0, "fluid_sweeps": 0, "magnetic_sweeps": 0, "transposes": 0}
    sections = {"cfl": 0.0, "fluid": 0.0, "magnetic": 0.0, "transpose": 0.0}
    t_start = time.perf_counter()

    def timed(section, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        sections[section] += (time.perf_counter() - t0) * 1e3
        return out

    dt = timed("cfl", cfl_timestep, state, params)
    census["cfl"] += 1

    # (sweep axis, transpose direction to apply afterwards)
    schedule = (("x", "fwd"), ("y", "fwd"), ("z", None),
                ("z", "inv"), ("y", "inv"), ("x", None))
    for axis, flip in schedule:
        assert state.shape.orientation[0] == axis
        timed("fluid", fluid_sweep, state, dt, params, workers)
        census["fluid_sweeps"] += 1
        timed("magnetic", magnetic_sweep, state, dt, params, workers)
        census["magnetic_sweeps"] += 1
        if flip is not None:
            timed("transpose", transpose, state, inverse=(flip == "inv"), workers=workers)
            census["transposes"] += 1

    state.time += 2.0 * dt
    state.cycle += 1
    wall_ms = (time.perf_counter() - t_start) * 1e3
    return StepReport(dt=dt, wall_ms=wall_ms, census=census, sections=sections)


def run(state: ConservedState, params: SchemeParams, n_cycles: int | None = None,
        t_end: float | None = None, workers: int = 1) -> tuple[ConservedState, list[StepReport]]:
    """Iterate step_cycle until the cycle count, or until a cycle starts at >= t_end."""
    if (n_cycles is None) == (t_end is None):
        raise ValueError("specify exactly one of n_cycles or t_end")
    reports: list[StepReport] = []
    while True:
        if n_cycles is not None and len(reports) >= n_cycles:
            break
        if t_end is not None and state.time >= t_end:
            break
        reports.append(step_cycle(state, params, workers=workers))
    return state, reports
