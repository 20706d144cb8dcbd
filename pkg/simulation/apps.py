"""Django app configuration for the simulation app."""

from django.apps import AppConfig


class SimulationAppConfig(AppConfig):
    """App config for the numerical core (no models, no database)."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "simulation"
    verbose_name = "Fog Massive MIMO Simulation"
