"""Django settings for fogsim (Fog massive MIMO coordination simulator).

The project has no database and no web surface. Django provides the
management-command CLI, settings and logging configuration for:
- simulation: layout, channel, coordination, metrics and Monte Carlo core
- orchestration: Dagster sweep job and the ``run_sweep`` command

Runtime settings are read from the environment (or a ``.env`` file next to
manage.py) with python-decouple.
"""

from pathlib import Path

from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent

# Never used for signing; Django only requires the setting to exist.
SECRET_KEY = config("FOGSIM_SECRET_KEY", default="fogsim-offline-simulator")
DEBUG = config("FOGSIM_DEBUG", default=False, cast=bool)
ALLOWED_HOSTS: list[str] = []


# ==============================================================================
# DATABASE CONFIGURATION
# ==============================================================================

# Results go to CSV files; nothing is persisted in a database.
DATABASES: dict = {}


# ==============================================================================
# APPLICATION DEFINITION
# ==============================================================================

INSTALLED_APPS = [
    "simulation",
    "orchestration",
]

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True


# ==============================================================================
# SIMULATION RUNTIME
# ==============================================================================

FOGSIM_OUTPUT_DIR = Path(
    config("FOGSIM_OUTPUT_DIR", default=str(BASE_DIR / "results"))
)
FOGSIM_WORKERS = config("FOGSIM_WORKERS", default=1, cast=int)
FOGSIM_LOG_LEVEL = config("FOGSIM_LOG_LEVEL", default="INFO")

# DAGSTER_HOME holds dagster.yaml (read-only); run history goes here.
DAGSTER_HOME = BASE_DIR / "orchestration" / "dagster_home"
FOGSIM_STATE_DIR = Path(
    config("FOGSIM_STATE_DIR", default=str(BASE_DIR / ".dagster"))
)


# ==============================================================================
# LOGGING
# ==============================================================================

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "simulation": {
            "handlers": ["console"],
            "level": FOGSIM_LOG_LEVEL,
            "propagate": False,
        },
        "orchestration": {
            "handlers": ["console"],
            "level": FOGSIM_LOG_LEVEL,
            "propagate": False,
        },
        "django": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}
