"""Pytest wiring: configure Django the same way manage.py does before tests run."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'hardylab.settings')
django.setup()
