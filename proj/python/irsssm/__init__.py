"""Secrecy-rate optimization for IRS-aided hybrid secure spatial modulation."""

import json

from ._irsssm import (
    ChannelSet,
    Constellation,
    Geometry,
    HybridPrecoder,
    InvalidInput,
    IrsPhaseVector,
    NumericalError,
    Point3,
    SystemConfig,
    channel_digest,
    draw_channels,
    flop_estimate,
    joint_optimize,
    path_loss_db,
    run_config,
    secrecy_rate,
)


def run(config, trials=0, full_scale=False):
    """Run a campaign from a dict or JSON string; returns (records, summary dict)."""
    text = config if isinstance(config, str) else json.dumps(config)
    out = run_config(text, trials, full_scale)
    return out["records"], json.loads(out["summary_json"])


__all__ = [
    "ChannelSet",
    "Constellation",
    "Geometry",
    "HybridPrecoder",
    "InvalidInput",
    "IrsPhaseVector",
    "NumericalError",
    "Point3",
    "SystemConfig",
    "channel_digest",
    "draw_channels",
    "flop_estimate",
    "joint_optimize",
    "path_loss_db",
    "run",
    "run_config",
    "secrecy_rate",
]
