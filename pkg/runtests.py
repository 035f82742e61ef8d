#!/usr/bin/env python
"""Run the conetool test suite through Django's test runner."""

import os
import sys

import django
from django.conf import settings
from django.test.utils import get_runner


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "conetool.tests.settings")
    django.setup()
    TestRunner = get_runner(settings)
    failures = TestRunner(verbosity=2).run_tests(argv or ["conetool.tests"])
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
