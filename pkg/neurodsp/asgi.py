"""
ASGI config for the neurodsp project.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'neurodsp.settings')

application = get_asgi_application()
