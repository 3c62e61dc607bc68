import math

import numpy as np
import pytest

from shrinkerlab.flow import (
    SERIES,
    FlowConfig,
    FlowError,
    flow_step,
    mean_radius,
    monitor_entropy,
    run_flow,
    sphere_ode_radius,
)
from shrinkerlab.generate import gen_mesh
from shrinkerlab.soliton import shrinker_residual


def test_sphere_ode_closed_forms():
    assert math.isclose(float(sphere_ode_radius(2.0, 3.0)), 2.0)
    assert float(sphere_ode_radius(1.8, 1.0)) < 1.8
    assert math.isclose(float(sphere_ode_radius(2.0, 0.5, "mcf")), math.sqrt(2.0))
    assert float(sphere_ode_radius(1.0, 10.0, "mcf")) == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(mode="willmore")
    with pytest.raises(ValueError):
        FlowConfig(stepper="rk4")
    with pytest.raises(ValueError):
        FlowConfig(dt=0.0)
    with pytest.raises(ValueError):
        FlowConfig(growth_stop=1.0)
    with pytest.raises(ValueError):
        FlowConfig(residual_tol=-1.0)
    assert FlowConfig(dt=0.5).time_step(None) == 0.5


def test_one_explicit_step_matches_ode():
    m = gen_mesh("icosphere", resolution=4, radius=1.8)
    new = flow_step(m, None, FlowConfig(stepper="explicit"), dt=1e-3)
    # r' = -(2/r - r/2) at r = 1.8
    exact = 1.8 - 1e-3 * (2 / 1.8 - 0.9)
    assert abs(mean_radius(new) - exact) / exact < 1e-5


@pytest.mark.parametrize("stepper", ["explicit", "semi_implicit"])
def test_radius_two_sphere_is_stationary(ico3, stepper):
    res = shrinker_residual(ico3).linf
    new = flow_step(ico3, None, FlowConfig(stepper=stepper, dt=1e-3))
    assert np.abs(new.vertices - ico3.vertices).max() <= res * 1e-3 * (1 + 1e-9)


def test_exact_sphere_stops_on_displacement(ico3):
    tr = run_flow(ico3, FlowConfig(dt=0.01, residual_tol=None))
    assert tr.stop_reason == "displacement_tol"


@pytest.mark.parametrize("stepper", ["explicit", "semi_implicit"])
def test_mcf_sphere_shrinks_like_ode(stepper):
    m = gen_mesh("icosphere", resolution=3, radius=2.0)
    cfg = FlowConfig(mode="mcf", stepper=stepper, dt=1e-3, max_steps=200, displacement_tol=None)
    tr = run_flow(m, cfg)
    exact = float(sphere_ode_radius(2.0, 0.2, "mcf"))
    assert abs(mean_radius(tr.final) - exact) / exact < 1e-3
    assert tr.stop_reason == "max_steps"


def test_flat_disk_does_not_move(disk):
    for mode in ("mcf", "rescaled"):
        for stepper in ("explicit", "semi_implicit"):
            new = flow_step(disk, None, FlowConfig(mode=mode, stepper=stepper, dt=0.01))
            assert np.abs(new.vertices - disk.vertices).max() < 1e-12


def test_boundary_fixed(tube32):
    new = flow_step(tube32, None, FlowConfig(mode="mcf", dt=0.01))
    b = tube32.boundary
    assert np.array_equal(new.vertices[b], tube32.vertices[b])
    assert np.abs(new.vertices[~b] - tube32.vertices[~b]).max() > 0


def test_quality_floor_raises(ico3):
    with pytest.raises(FlowError, match="quality"):
        flow_step(ico3, None, FlowConfig(quality_floor=0.999, dt=1e-3))


def test_run_flow_attaches_trajectory_on_error():
    m = gen_mesh("icosphere", resolution=2, radius=2.0, perturbation=0.3, seed=1)
    cfg = FlowConfig(mode="mcf", stepper="explicit", dt=0.5, max_steps=50, quality_floor=0.3)
    with pytest.raises(FlowError) as err:
        run_flow(m, cfg)
    assert err.value.trajectory is not None
    assert err.value.trajectory.stop_reason == "error"


def test_stop_rules_and_monitors(ico3):
    tr = run_flow(ico3, FlowConfig(dt=0.01, max_steps=5))
    assert tr.stop_reason == "residual_tol"
    assert tr.steps == 0
    tr = run_flow(ico3, FlowConfig(dt=0.01, max_steps=5, residual_tol=None, monitor_every=2,
                                   displacement_tol=None))
    assert tr.stop_reason == "max_steps"
    assert tr.series["step"] == [0, 2, 4, 5]
    assert tr.series["step"] == sorted(tr.series["step"])
    csv = tr.to_csv().splitlines()
    assert csv[0] == ",".join(SERIES)
    assert len(csv) == len(tr.series["step"]) + 1
    man = tr.manifest()
    assert man["stop_reason"] == tr.stop_reason


def test_rescaled_flow_decreases_residual_and_F():
    m = gen_mesh("icosphere", resolution=2, radius=2.0, perturbation=0.1, band=(2, 3),
                 even=True, zero_mean=True)
    tr = run_flow(m, FlowConfig(dt=0.02, max_steps=60))
    s = tr.series
    assert min(s["residual_linf"]) < s["residual_linf"][0] / 3
    assert monitor_entropy(tr).relative < 1e-3


def test_monitor_entropy_sequences():
    assert monitor_entropy([3.0, 2.0, 1.0]).max_violation == 0.0
    chk = monitor_entropy([3.0, 2.0, 2.5, 1.0])
    assert chk.max_violation == 0.5 and chk.index == 2
    assert math.isclose(chk.relative, 0.5 / 3)
    assert monitor_entropy([1.0]).index is None


def test_snapshots_kept(ico3):
    tr = run_flow(ico3, FlowConfig(dt=0.01, max_steps=3, residual_tol=None, keep_snapshots=True,
                                   displacement_tol=None))
    assert len(tr.snapshots) == len(tr.series["step"]) == 4
