"""Partitions into d-th powers."""
