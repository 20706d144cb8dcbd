"""Dagster orchestration of fogsim sweeps."""
