import math

import numpy as np
import pytest

import irsssm


@pytest.fixture
def desk():
    cfg = irsssm.SystemConfig.desk_scale()
    return cfg, irsssm.draw_channels(cfg, 7)


def test_config_defaults():
    cfg = irsssm.SystemConfig.desk_scale()
    assert (cfg.n_irs, cfg.n_rf, cfg.n_k, cfg.m_ary) == (16, 4, 2, 4)
    assert cfg.n_hyp == 16
    assert cfg.tau == pytest.approx(cfg.beta * cfg.p_total / 4)
    cfg.n_rf = 0
    with pytest.raises(ValueError):
        cfg.validate()


def test_channels_are_seeded(desk):
    cfg, ch = desk
    again = irsssm.draw_channels(cfg, 7)
    assert ch.h.shape == (cfg.n_b, cfg.n_tx)
    assert ch.f.shape == (cfg.n_irs, cfg.n_tx)
    assert np.array_equal(ch.g, again.g)
    assert irsssm.channel_digest(ch) == irsssm.channel_digest(again)
    assert irsssm.channel_digest(ch) != irsssm.channel_digest(irsssm.draw_channels(cfg, 8))


def test_secrecy_rate_bounded(desk):
    cfg, ch = desk
    v = irsssm.IrsPhaseVector.random(cfg.n_irs, 3)
    assert np.allclose(np.abs(v.values), 1.0)
    p = irsssm.HybridPrecoder.equal_power(cfg.n_rf, cfg.n_k)
    assert p.norm() == pytest.approx(cfg.n_rf)
    r = irsssm.secrecy_rate(cfg, ch, v, p)
    assert 0.0 <= r["r_approx"] <= math.log2(cfg.n_hyp) + 1e-12
    assert r["r_approx"] == pytest.approx(math.log2(r["kappa_e"]) - math.log2(r["kappa_b"]))


def test_zero_channels_give_zero_rate():
    cfg = irsssm.SystemConfig.desk_scale()
    ch = irsssm.ChannelSet.zeros(cfg)
    v = irsssm.IrsPhaseVector.ones(cfg.n_irs)
    p = irsssm.HybridPrecoder.equal_power(cfg.n_rf, cfg.n_k)
    assert irsssm.secrecy_rate(cfg, ch, v, p)["r_approx"] == pytest.approx(0.0, abs=1e-12)


def test_precoder_outside_ball_rejected():
    with pytest.raises(ValueError):
        irsssm.HybridPrecoder(np.full(8, 2.0 + 0j), 4, 2)


@pytest.mark.parametrize("combination", [1, 2, 3])
def test_joint_does_not_decrease(desk, combination):
    cfg, ch = desk
    v0 = irsssm.IrsPhaseVector.random(cfg.n_irs, 1)
    p0 = irsssm.HybridPrecoder.equal_power(cfg.n_rf, cfg.n_k)
    out = irsssm.joint_optimize(cfg, ch, combination, v0, p0)
    assert out["objective"] >= out["initial_objective"] - 1e-9
    assert out["converged"]
    assert len(out["trace"]) <= 10
    # the AN beams stay at those of p0 for the whole run
    again = irsssm.secrecy_rate(cfg, ch, out["v"], out["p"], out["fa_blocks"])
    assert out["objective"] == pytest.approx(again["r_approx"], abs=1e-12)


def test_flops_ordering():
    cfg = irsssm.SystemConfig.desk_scale()
    cfg.n_irs = 50
    totals = [irsssm.flop_estimate(cfg, m)["total"] for m in ("irs_bca", "irs_admm", "irs_sdr")]
    assert totals[0] < totals[1] < totals[2]
    with pytest.raises(ValueError):
        irsssm.flop_estimate(cfg, "nope")


def test_run_small_campaign():
    config = {
        "system": {"n_irs": 8},
        "experiment": {"kind": "sr_vs_power", "power_dbm": [20], "combinations": ["random", "comb1"]},
    }
    records, summary = irsssm.run(config, trials=2)
    assert len(records) == 4
    assert all(r["error"] == "" for r in records)
    assert {g["method"] for g in summary["groups"]} == {"random", "comb1"}
    again, _ = irsssm.run(config, trials=2)
    assert [r["sr_bits"] for r in records] == [r["sr_bits"] for r in again]


def test_bad_config_key():
    with pytest.raises(ValueError):
        irsssm.run({"experiment": {"bogus": 1}})
