import json
import math
import os
from pathlib import Path

import pytest

import pscd

SOURCE = Path(os.environ.get("PSCD_SOURCE_DIR", Path(__file__).resolve().parents[2]))

MINIMAL = {
    "model": {"kind": "gaussian", "mu0": 0.0, "mu1": 1.0, "sigma": 1.0},
    "prior": {"kind": "geometric", "pi_inf": 0.2, "theta": 0.1},
    "policy": {"rule": "simplified", "alpha": 0.1, "risk": "lfdr", "utility": "neg-iadd"},
    "run": {"K": 20, "horizon": 80, "replications": 6, "seed": 3},
}


def test_prior():
    prior = pscd.ChangePointPrior.geometric(0.2, 0.1, 100)
    assert prior.mass(0) == pytest.approx(0.08)
    assert prior.survival(1) == pytest.approx(0.92)
    assert prior.mass_never == 0.2
    head = pscd.ChangePointPrior.negative_binomial_head(3, 0.1, 0.2, 10)
    assert head[0] == pytest.approx(0.0008)


def test_posterior_matches_direct_sum():
    prior = pscd.ChangePointPrior.geometric(0.2, 0.1, 50)
    state = pscd.PosteriorState(1)
    lr = []
    for t in range(30):
        value = math.sin(t)
        state.advance(prior, [value])
        lr.append(value)
        assert abs(state.weights()[0] - pscd.direct_posterior(prior, lr)) < 1e-10
    assert state.time == 30


def test_metrics():
    assert pscd.lfwer([0.5, 0.5]) == pytest.approx(0.75)
    assert pscd.glfwer([0.5, 0.5], 2) == pytest.approx(0.25)
    assert pscd.enumerate_glfwer([0.5, 0.5], 2) == pytest.approx(0.25)
    assert pscd.lfdr([0.9, 0.7]) == pytest.approx(0.2)
    assert pscd.iarl([0.5], 0.2) == pytest.approx(0.4)
    assert pscd.change_by_now(0.5, 0.2) == pytest.approx(0.6)
    with pytest.raises(pscd.InvalidArgument):
        pscd.glfwer([0.5], 0)


def test_select():
    out = pscd.select("simplified", [0, 1, 2, 3], [0.9, 0.02, 0.2, 0.05], 0.05, "lfnr", "iarl", 0.1)
    assert out["next"] == [1, 2, 3]
    assert out["risk"] <= 0.1
    general = pscd.select("general", [0, 1], [0.05, 0.05], 0.1, "lfnr", "iarl", 0.1)
    assert general["next"] == [0, 1]
    with pytest.raises(pscd.SizeGuard):
        pscd.select("general", list(range(21)), [0.1] * 21, 0.1, "lfnr", "iarl", 0.1)


def test_run_experiment_is_deterministic():
    text = json.dumps(MINIMAL)
    a = pscd.run_experiment(text, threads=1)
    b = pscd.run_experiment(text, threads=3)
    assert a == b
    assert a["replications"] == 6
    assert len(a["mean_fdp"]) == 80
    assert a["risk_violations"] == 0


def test_unknown_key_is_rejected():
    bad = json.loads(json.dumps(MINIMAL))
    bad["run"]["threads"] = 2
    with pytest.raises(pscd.ConfigError):
        pscd.run_experiment(json.dumps(bad))


def test_trace_schedule():
    trace = pscd.run_replication_trace(json.dumps(MINIMAL), 0)
    sched = pscd.schedule(trace)
    times = [t for t, _ in sched]
    assert times == sorted(times)
    fixture = (SOURCE / "tests" / "cli" / "two_drops_trace.json").read_text()
    assert pscd.schedule(fixture) == [(2, [2]), (4, [1])]


def test_oracle_counterexample():
    lines = pscd.oracle_check("counterexample")
    assert lines
    assert all(passed for _, passed, _ in lines)
