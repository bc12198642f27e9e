"""End-to-end smoke tests of the python bindings.

These stay cheap on purpose: heavy statistical validation lives in the
C++ test suites, so each test here checks one binding against a value
the core already pins down."""

import json
import math
import os

import pytest

import condensate as cs


def leading_example():
    return cs.ModelParams(cs.RateSpec.inclusion(1, 1.0), 1.0)


def test_flow_matches_closed_form():
    p = leading_example()
    grid = [0.0, 0.5, 1.0, 2.0]
    sol = cs.integrate_flow(p, [1.0], grid)
    for t, g in zip(sol["times"], sol["gamma"]):
        assert g == pytest.approx(cs.gamma_closed_form_A1(1.0, 1.0, t), abs=1e-8)


def test_model_functionals():
    p = leading_example()
    assert p.rho_c() == pytest.approx(0.5)
    assert p.gamma_bar() == pytest.approx(0.5)
    assert cs.rho_crit(p.spec) == pytest.approx(0.5)
    assert cs.fixed_point_ybar(p.spec) == pytest.approx([0.5, 0.5])
    y = [0.7]
    assert cs.beta_of_y(p, y) == pytest.approx(cs.beta_bar(p.spec, y), rel=1e-12)
    limit = cs.long_time_gamma(cs.ModelParams(p.spec, 2.0), [1.0])
    assert limit["converged"]
    assert limit["gamma_limit"] == pytest.approx(0.75, abs=1e-6)


def test_bad_inputs_raise_config_error():
    with pytest.raises(cs.ConfigError):
        cs.RateSpec.inclusion(1, -1.0)
    with pytest.raises(cs.ConfigError):
        cs.ModelParams(cs.RateSpec.inclusion(1, 1.0), 0.0)
    # a slow profile of the wrong width must not be priced silently
    with pytest.raises(cs.ConfigError):
        cs.gamma_of_y(leading_example(), [])


def test_stick_breaking_sampler():
    assert cs.stick_break_weights([0.5, 0.5, 0.5]) == [0.5, 0.25, 0.125]
    assert cs.default_stick_count(1.0) == 34
    assert cs.pd_moment(2, 1.0) == pytest.approx(0.5)
    assert cs.pd_moment(4, 2.0) == pytest.approx(0.1)
    samples = cs.sample_pd(theta=1.0, n=4000, seed=7)
    assert len(samples) == 4000
    mean_phi2 = sum(cs.phi_m(x, 2) for x in samples) / len(samples)
    assert mean_phi2 == pytest.approx(0.5, abs=0.02)
    assert all(x == sorted(x, reverse=True) for x in samples[:10])


def test_cluster_diffusion_tracks_hierarchy():
    p = leading_example()
    grid = [0.0, 0.3]
    oracle = cs.solve_hierarchy(p, [1.0], [1.0], [[2]], grid)
    i2 = oracle["labels"].index("phi2")
    mc = cs.run_wf_moments(p, [1.0], [1.0], 30, 2e-3, grid, 800, 20260819)
    assert mc["guard_fraction"] == 0.0
    for g in range(len(grid)):
        diff = abs(mc["phi2_mean"][g] - oracle["values"][g][i2])
        assert diff <= 4.0 * mc["phi2_se"][g] + 2e-3
    # the deterministic environment must be the same one the oracle used
    assert mc["gamma"] == pytest.approx(oracle["gamma"], abs=1e-9)


def test_particle_run_shapes():
    p = leading_example()
    out = cs.simulate_ip(p, 64, horizon=0.3, grid_points=4, replicas=2,
                         seed=11, phi_max=2)
    assert "gamma_N" in out["columns"]
    gidx = out["columns"].index("gamma_N")
    assert len(out["times"]) == 4
    assert len(out["mean"][gidx]) == 4
    assert all(0.0 <= v <= 1.0 for v in out["mean"][gidx])
    assert len(out["events_per_replica"]) == 2


def test_run_config_writes_files(tmp_path):
    cfg = {
        "kind": "ode",
        "out_dir": str(tmp_path),
        "horizon": 1.0,
        "grid_points": 5,
    }
    res = cs.run_config(json.dumps(cfg))
    assert res["exit_code"] == 0
    assert res["files"]
    for f in res["files"]:
        assert os.path.exists(f)
        assert os.path.exists(f + ".meta.json")
    summary = json.loads(res["summary"])
    assert math.isfinite(summary["gamma_final"])

    canon = cs.canonical_config(json.dumps(cfg))
    assert cs.canonical_config(canon) == canon
