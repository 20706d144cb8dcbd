# mypy: ignore-errors
# vulture whitelist - false positives
# pytest hook parameters (required by pytest API, cannot be renamed)
config  # pytest_configure hook parameter
session  # pytest_sessionfinish hook parameter
exitstatus  # pytest_sessionfinish hook parameter

# Django settings read by the framework, not by project code
ALLOWED_HOSTS  # noqa
SECRET_KEY  # noqa
DEFAULT_AUTO_FIELD  # noqa
LANGUAGE_CODE  # noqa
TIME_ZONE  # noqa
USE_I18N  # noqa
USE_TZ  # noqa
LOGGING  # noqa

# Django app/command attributes read by the framework
verbose_name  # noqa
requires_system_checks  # noqa

# Dagster code location loaded by `dagster dev -m orchestration.dagster_home.repository`
defs  # noqa
