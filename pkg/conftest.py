"""Project-level pytest configuration.

A temporary output root is created per session so that sweep CSVs and
Dagster run storage written by tests never land inside the source tree.
pytest_configure runs before pytest-django calls django.setup(), so the
environment variable is visible to fogsim/test_settings.py. The root is
removed in pytest_sessionfinish.
"""

from __future__ import annotations

import os
import shutil
import tempfile

_TEST_OUTPUT_ROOT: str | None = None


def pytest_configure(config) -> None:
    """Create an isolated output root before Django setup."""
    global _TEST_OUTPUT_ROOT

    _TEST_OUTPUT_ROOT = tempfile.mkdtemp(prefix="fogsim_test_output_")
    os.environ["FOGSIM_TEST_OUTPUT_ROOT"] = _TEST_OUTPUT_ROOT


def pytest_sessionfinish(session, exitstatus) -> None:
    """Remove the temporary output root after the test session completes."""
    if _TEST_OUTPUT_ROOT:
        shutil.rmtree(_TEST_OUTPUT_ROOT, ignore_errors=True)
