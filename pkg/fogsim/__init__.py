"""Fog massive MIMO simulator: Django project package (settings only)."""
