"""
WSGI config for the neurodsp project.

Serves the Django admin and the experiment-run API.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'neurodsp.settings')

application = get_wsgi_application()
