"""Dagster repository - entry point for the sweep job."""

import os

import django
from dagster import Definitions

from .sweep_jobs import sweep_job

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "fogsim.settings")
django.setup()


defs = Definitions(jobs=[sweep_job])
