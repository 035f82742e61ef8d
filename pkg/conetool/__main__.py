"""
Console entry point: ``conetool <command> <scenario> [options]``.

Outside a Django project a minimal settings object is configured, with all
logging on stderr so stdout carries only the report.
"""

import os
import sys

import django
from django.conf import settings


def _configure():
    if settings.configured or os.environ.get("DJANGO_SETTINGS_MODULE"):
        return
    settings.configure(
        INSTALLED_APPS=["conetool"],
        LOGGING={
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
            },
            "handlers": {
                "stderr": {
                    "class": "logging.StreamHandler",
                    "stream": "ext://sys.stderr",
                    "formatter": "plain",
                },
            },
            "loggers": {
                "conetool": {
                    "handlers": ["stderr"],
                    "level": os.environ.get("CONETOOL_LOG_LEVEL", "INFO"),
                    "propagate": False,
                },
            },
        },
    )


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    _configure()
    django.setup()

    from django.core.management import execute_from_command_line

    execute_from_command_line(["conetool", "conetool", *argv])


if __name__ == "__main__":
    main()
