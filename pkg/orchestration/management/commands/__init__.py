"""Management commands for the orchestration app."""
