import os

from django.conf import ENVIRONMENT_VARIABLE, settings


def lab_setting(name: str, default):
    """Read a HARDYLAB_* setting, falling back when no Django settings are available."""
    if not (settings.configured or os.environ.get(ENVIRONMENT_VARIABLE)):
        return default
    return getattr(settings, name, default)
