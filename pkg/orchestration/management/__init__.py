"""Management commands package for the orchestration app."""
