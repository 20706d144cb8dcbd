"""Management command: run a coordination-radius sweep headlessly via Dagster."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import TYPE_CHECKING

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from simulation.config_io import (
    SWEEP_CONFIG_FILENAME,
    ConfigError,
    add_config_arguments,
    load_config,
    overrides_from_options,
    write_config_file,
)

if TYPE_CHECKING:
    from argparse import ArgumentParser

logger = logging.getLogger(__name__)

EXIT_JOB_FAILED = 1
EXIT_CONFIG_ERROR = 2


class Command(BaseCommand):
    """Simulate the configured radius sweep and write its CSV results."""

    help = (
        "Run the Fog massive MIMO coordination-radius sweep and write one "
        "CDF CSV per metric and radius, plus summary.csv and tradeoff.csv."
    )
    requires_system_checks: list[str] = []

    def add_arguments(self, parser: ArgumentParser) -> None:
        """Register --config, --out, --workers and the per-key overrides."""
        add_config_arguments(parser)
        parser.add_argument(
            "--out",
            type=Path,
            default=None,
            help="Output directory (default: FOGSIM_OUTPUT_DIR).",
        )
        parser.add_argument(
            "--workers",
            type=int,
            default=None,
            help="Worker processes (default: FOGSIM_WORKERS).",
        )

    def handle(self, *args: object, **options: object) -> None:
        """Validate the config, run the sweep job and report the outcome."""
        try:
            config = load_config(
                options["config"], overrides_from_options(options)
            )
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=EXIT_CONFIG_ERROR) from exc

        workers = options["workers"]
        if workers is None:
            workers = settings.FOGSIM_WORKERS
        if workers < 1:
            msg = f"--workers must be >= 1, got {workers}"
            raise CommandError(msg, returncode=EXIT_CONFIG_ERROR)

        out_dir = Path(options["out"] or settings.FOGSIM_OUTPUT_DIR)
        config_path = write_config_file(
            config, out_dir / SWEEP_CONFIG_FILENAME
        )
        logger.info("Effective configuration written to %s", config_path)

        # DAGSTER_HOME: where dagster.yaml lives (project source, read-only).
        # DAGSTER_STORAGE_DIR: where Dagster writes SQLite run history.
        dagster_storage = Path(settings.FOGSIM_STATE_DIR)
        os.environ.setdefault("DAGSTER_HOME", str(settings.DAGSTER_HOME))
        os.environ.setdefault("DAGSTER_STORAGE_DIR", str(dagster_storage))
        dagster_storage.mkdir(parents=True, exist_ok=True)

        from dagster import DagsterInstance

        from orchestration.dagster_home import sweep_jobs

        result = sweep_jobs.sweep_job.execute_in_process(
            run_config=sweep_jobs.sweep_run_config(
                config_path, out_dir, workers
            ),
            instance=DagsterInstance.get(),
            raise_on_error=False,
        )

        for event in result.all_events:
            message = getattr(event, "message", None)
            if message:
                level = getattr(event, "level", None)
                prefix = level.value if level is not None else "INFO"
                logger.info("dagster %s: %s", prefix, message)

        if not result.success:
            msg = "Sweep job failed; see the Dagster event log above."
            raise CommandError(msg, returncode=EXIT_JOB_FAILED)

        paths = result.output_for_node("export_sweep")
        self.stdout.write(
            self.style.SUCCESS(f"Wrote {len(paths)} files to {out_dir}")
        )
