import numpy as np
import pytest

from tvdmhd import (GridShape, SchemeParams, discrete_divergence, init_condition,
                    run, step_cycle, totals, transpose)

from conftest import state_bytes


def test_census_matches_step_composition(params):
    state = init_condition("solenoidal_random", GridShape(8, 8, 8), params, seed=1)
    report = step_cycle(state, params)
    assert report.census == {"cfl": 1, "fluid_sweeps": 6, "magnetic_sweeps": 6,
                             "transposes": 4}
    assert report.dt > 0 and report.wall_ms > 0


def test_sweep_axis_sequence_is_palindrome(params):
    state = init_condition("uniform", GridShape(8, 8, 8), params)
    report = step_cycle(state, params)
    assert report.axes == ("x", "y", "z", "z", "y", "x")
    assert report.axes == report.axes[::-1]


def test_uniform_static_state_unchanged_bitwise(params):
    state = init_condition("uniform", GridShape(8, 8, 8), params)
    ref = state.copy()
    report = step_cycle(state, params)
    assert np.isfinite(report.dt)
    for name, arr in state.components():
        assert (arr == getattr(ref, name)).all()


def test_orientation_restored_and_time_advanced(params):
    state = init_condition("solenoidal_random", GridShape(8, 8, 8), params, seed=2)
    report = step_cycle(state, params)
    assert state.shape.orientation == ("x", "y", "z")
    assert state.time == pytest.approx(2 * report.dt)
    assert state.cycle == 1


def test_step_cycle_rejects_non_canonical_orientation(params):
    state = init_condition("uniform", GridShape(8, 8, 8), params)
    transpose(state)
    with pytest.raises(ValueError, match="canonical orientation"):
        step_cycle(state, params)


def test_conservation_and_divergence_over_ten_cycles(params):
    state = init_condition("solenoidal_random", GridShape(16, 16, 16), params, seed=11)
    mass0, mom0, e0 = totals(state)
    bmax = max(abs(getattr(state, f"b{i}")).max() for i in (1, 2, 3))
    for _ in range(10):
        step_cycle(state, params)
        assert abs(discrete_divergence(state)).max() <= 1e-12 * bmax / state.shape.dx
    mass, mom, e = totals(state)
    assert mass == pytest.approx(mass0, rel=1e-12)
    assert e == pytest.approx(e0, rel=1e-12)
    for a, b in zip(mom, mom0):
        assert a == pytest.approx(b, rel=1e-12)


def test_run_zero_cycles_is_identity(params):
    state = init_condition("solenoidal_random", GridShape(8, 8, 8), params, seed=3)
    ref = state_bytes(state)
    final, reports = run(state, params, n_cycles=0)
    assert reports == []
    assert state_bytes(final) == ref


def test_run_repeatability_bitwise(params):
    blobs = []
    for _ in range(2):
        state = init_condition("solenoidal_random", GridShape(8, 8, 8), params, seed=5)
        run(state, params, n_cycles=3, workers=2)
        blobs.append(state_bytes(state))
    assert blobs[0] == blobs[1]


def test_run_stops_at_t_end(params):
    state = init_condition("solenoidal_random", GridShape(8, 8, 8), params, seed=5)
    final, reports = run(state, params, t_end=0.9)
    assert reports
    start_of_last = final.time - 2 * reports[-1].dt
    assert start_of_last < 0.9 <= final.time or final.time >= 0.9


def test_run_requires_exactly_one_stop_rule(params):
    state = init_condition("uniform", GridShape(8, 8, 8), params)
    with pytest.raises(ValueError, match="exactly one"):
        run(state, params)
    with pytest.raises(ValueError, match="exactly one"):
        run(state, params, n_cycles=1, t_end=1.0)


def test_single_precision_cycle_keeps_dtype():
    params32 = SchemeParams(precision="single")
    state = init_condition("solenoidal_random", GridShape(16, 16, 16), params32, seed=1)
    step_cycle(state, params32)
    for _, arr in state.components():
        assert arr.dtype == np.float32
        assert np.isfinite(arr).all()


def test_section_timings_cover_wall_time(params):
    state = init_condition("solenoidal_random", GridShape(16, 16, 16), params, seed=7)
    report = step_cycle(state, params)
    total = sum(report.sections.values())
    assert total <= report.wall_ms
    assert total >= 0.98 * report.wall_ms
