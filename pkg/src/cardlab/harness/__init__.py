"""Evaluation: external policy endpoints, match scheduling and metrics."""

from cardlab.harness.endpoints import PolicyEndpoint, RemotePolicy, act_remote
from cardlab.harness.evaluate import MetricReport, compute_win_rate, evaluate

__all__ = ["MetricReport", "PolicyEndpoint", "RemotePolicy", "act_remote", "compute_win_rate", "evaluate"]
