"""
Console entry point: ``neurodsp <command> ...``.

Same dispatcher as ``manage.py``; the simulation subcommands are the
management commands shipped by the ``experiments`` app.
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'neurodsp.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(['neurodsp', *sys.argv[1:]])


if __name__ == '__main__':
    main()
