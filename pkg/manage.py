#!/usr/bin/env python
"""Entry point for the toolkit: classify, validate, expand, spectrum, meyer and test."""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Django is required to run the toolkit commands; install the "
            "project dependencies first (uv sync)."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
