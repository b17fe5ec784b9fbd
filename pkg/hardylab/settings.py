"""
Django settings for the hardylab project.

The project has no web surface: Django supplies configuration, the
management-command CLI and the test runner. Every tunable below can be
overridden through the environment or a `.env` file.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='hardylab-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'paradox',
]

# No models are defined; the sqlite default keeps stock tooling happy.
DATABASES = {
    'default': {
        'ENGINE': config('DB_ENGINE', default='django.db.backends.sqlite3'),
        'NAME': config('DB_NAME', default=str(BASE_DIR / 'db.sqlite3')),
    },
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Hardy laboratory settings
HARDYLAB_VERSION = '1.0.0'
HARDYLAB_OUTPUT_DIR = config('HARDYLAB_OUTPUT_DIR', default='results')
HARDYLAB_DEFAULT_SEED = config('HARDYLAB_DEFAULT_SEED', default=20140101, cast=int)

# +1 or -1; flips the sign of the plate retardance in the Jones matrices.
HARDYLAB_RETARDANCE_SIGN = config('HARDYLAB_RETARDANCE_SIGN', default=1, cast=int)

HARDYLAB_MLE_TOLERANCE = config('HARDYLAB_MLE_TOLERANCE', default=1e-10, cast=float)
HARDYLAB_MLE_MAX_ITERATIONS = config('HARDYLAB_MLE_MAX_ITERATIONS', default=5000, cast=int)
HARDYLAB_ZERO_TOLERANCE = config('HARDYLAB_ZERO_TOLERANCE', default=1e-12, cast=float)

HARDYLAB_LOG_LEVEL = config('HARDYLAB_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s - %(levelname)s - %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'paradox': {
            'handlers': ['console'],
            'level': HARDYLAB_LOG_LEVEL,
            'propagate': False,
        },
    },
}
