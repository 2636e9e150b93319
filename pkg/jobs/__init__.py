"""
Netgames experiment jobs, one per CLI subcommand
"""

from .simulate import SimulateJob
from .learn import LearnJob
from .sweep import SweepJob
from .evaluate import EvaluateJob
from .cluster import ClusterJob

__all__ = [
    'SimulateJob',
    'LearnJob',
    'SweepJob',
    'EvaluateJob',
    'ClusterJob',
]
