"""Simulation app: Fog massive MIMO layout, channel, coordination and sweep."""
