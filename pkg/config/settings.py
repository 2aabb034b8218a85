"""
Django settings for config project.

The project has no web surface: Django provides configuration, the app
registry, management commands and the test runner. Numerical limits live in
the namespaced dictionaries at the bottom of this file.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env')


def env_bool(name, default):
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


def env_number(name, default, cast=float):
    value = os.environ.get(name)
    if value is None:
        return default
    return cast(value)


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('SECRET_KEY', 'django-insecure-selfaffine-spectrum-dev-key')

DEBUG = env_bool('DEBUG', False)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    'rest_framework',

    'algebra',
    'expansion',
    'tiling',
    'spectrum',
    'cli',
]


# Database
# No app defines tables; sqlite keeps the test runner and checks happy.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('DB_NAME', BASE_DIR / 'db.sqlite3'),
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ============================
# Logging
# ============================

# stdout is reserved for JSON reports, everything else goes to stderr
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.environ.get('LOG_LEVEL', 'WARNING'),
    },
}


# ============================
# REST Framework Configuration
# ============================

# Serializers and renderers only; there are no views.
REST_FRAMEWORK = {
    'COERCE_DECIMAL_TO_STRING': False,
    'UNAUTHENTICATED_USER': None,
}


# ============================
# CELERY CONFIGURATION
# ============================

# Redis connection URL, only used when eager mode is switched off
CELERY_BROKER_URL = os.environ.get(
    'CELERY_BROKER_URL',
    'redis://127.0.0.1:6379/0'
)

# Result backend
CELERY_RESULT_BACKEND = os.environ.get(
    'CELERY_RESULT_BACKEND',
    'redis://127.0.0.1:6379/1'
)

# Screening runs in-process unless a worker pool is configured
CELERY_TASK_ALWAYS_EAGER = env_bool('CELERY_TASK_ALWAYS_EAGER', True)
CELERY_TASK_EAGER_PROPAGATES = True

CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 30 * 60


# ============================
# Numerical limits
# ============================

ALGEBRA = {
    'ROOT_PRECISION': env_number('ALGEBRA_ROOT_PRECISION', 1e-12),
    'UNIT_CIRCLE_TOL': env_number('ALGEBRA_UNIT_CIRCLE_TOL', 1e-12),
    # decimal digits used by mpmath during root refinement
    'WORK_DPS': env_number('ALGEBRA_WORK_DPS', 40, int),
    'MAX_DPS': env_number('ALGEBRA_MAX_DPS', 120, int),
}

EXPANSION = {
    'SELECTION_ANGLE_TOL': env_number('EXPANSION_SELECTION_ANGLE_TOL', 0.1),
    'SELECTION_MIN_F': env_number('EXPANSION_SELECTION_MIN_F', 1e-6),
    'DET_TOL': env_number('EXPANSION_DET_TOL', 1e-9),
    'COMMUTE_TOL': env_number('EXPANSION_COMMUTE_TOL', 1e-9),
    # block eigenvalues must sit this close to a root of min_poly
    'ROOT_MATCH_TOL': env_number('EXPANSION_ROOT_MATCH_TOL', 1e-3),
}

TILING = {
    'TILE_CAP': env_number('TILING_TILE_CAP', 10 ** 6, int),
    'CONTROL_POINT_TOL': env_number('TILING_CONTROL_POINT_TOL', 1e-13),
    'CONTROL_POINT_MAX_ITER': env_number('TILING_CONTROL_POINT_MAX_ITER', 10_000, int),
    'GEOMETRY_TOL': env_number('TILING_GEOMETRY_TOL', 1e-9),
    # distinct difference vectors closer than this are the same vector
    'MERGE_TOL': env_number('TILING_MERGE_TOL', 1e-7),
    # 0 searches up to kappa * max #D powers of the substitution
    'SEED_SEARCH_DEPTH': env_number('TILING_SEED_SEARCH_DEPTH', 0, int),
}

SPECTRUM = {
    'PROFILE_LENGTH': env_number('SPECTRUM_PROFILE_LENGTH', 25, int),
    'DECAY_THRESHOLD': env_number('SPECTRUM_DECAY_THRESHOLD', 1e-3),
    'RATE_CAP': env_number('SPECTRUM_RATE_CAP', 0.95),
    'STALL_FLOOR': env_number('SPECTRUM_STALL_FLOOR', 0.05),
    'PERIOD_TOL': env_number('SPECTRUM_PERIOD_TOL', 1e-9),
    'XI_CAP': env_number('SPECTRUM_XI_CAP', 10 ** 4, int),
    'PATCH_TILES': env_number('SPECTRUM_PATCH_TILES', 1500, int),
    'K_MAX': env_number('SPECTRUM_K_MAX', 10, int),
    'GRID': os.environ.get('SPECTRUM_GRID', '-2:2:0.25'),
    'DENOMINATOR_BOUND': env_number('SPECTRUM_DENOMINATOR_BOUND', 64, int),
    'RHO_SAMPLE': env_number('SPECTRUM_RHO_SAMPLE', 32, int),
    'HIGH_PRECISION_TRIGGER': env_number('SPECTRUM_HIGH_PRECISION_TRIGGER', 2.0 ** 48),
    'HIGH_PRECISION_BITS': env_number('SPECTRUM_HIGH_PRECISION_BITS', 128, int),
    'SCREEN_CHUNK': env_number('SPECTRUM_SCREEN_CHUNK', 64, int),
    'CLOSURE_MAX_ACCEPTED': env_number('SPECTRUM_CLOSURE_MAX_ACCEPTED', 40, int),
}
