"""Cluster-hopping planner and simulator for multi-beam HTS systems."""

__version__ = "0.1.0"
