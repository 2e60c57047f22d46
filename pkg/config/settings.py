"""
Django settings for gbcmass - Gauss-Bonnet-Chern mass toolkit

The project has no web surface; Django hosts the apps, the management
commands (mass, verify, penrose), the cache used for sphere grids and the
logging configuration.

For more information on this file, see
https://docs.djangoproject.com/en/5.0/topics/settings/
"""

import os
from pathlib import Path

from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; nothing here is served.
SECRET_KEY = config('SECRET_KEY', default='gbcmass-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=Csv())

# Application definition

INSTALLED_APPS = [
    # gbcmass apps (dependency order)
    "symfun",
    "tensor",
    "profiles",
    "confgeom",
    "quadrature",
    "mass",
    "horizon",
    "core",
]

# No database: every computation is in-process and stateless.
DATABASES = {}

# Caching Configuration
# https://docs.djangoproject.com/en/5.0/topics/cache/
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'gbcmass-grids',
        'TIMEOUT': int(config('GBC_GRID_CACHE_TIMEOUT', default=3600)),
        'OPTIONS': {
            'MAX_ENTRIES': 64,
        }
    }
}

# Internationalization
LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# ==============================================================================
# GBCMASS NUMERICAL SETTINGS
# ==============================================================================

# Worker threads for per-radius work (the --threads flag wins)
GBC_THREADS = config('GBC_THREADS', default=1, cast=int)

# Single seed for every randomized suite
GBC_SEED = config('GBC_SEED', default=42, cast=int)

# Tolerances
GBC_CONE_TOL = config('GBC_CONE_TOL', default=1e-10, cast=float)
GBC_HYPOTHESIS_TOL = config('GBC_HYPOTHESIS_TOL', default=1e-9, cast=float)
GBC_HORIZON_TOL = config('GBC_HORIZON_TOL', default=1e-8, cast=float)

# Finite-difference step for divergence residuals
GBC_FD_STEP = config('GBC_FD_STEP', default=1e-3, cast=float)

# Radius schedule and grids
GBC_DEFAULT_RADII = config('GBC_DEFAULT_RADII', default='geometric:10,160,5')
GBC_GRID_CACHE_TIMEOUT = config('GBC_GRID_CACHE_TIMEOUT', default=3600, cast=int)
GBC_VOLUME_GRID_DEGREE = config('GBC_VOLUME_GRID_DEGREE', default=7, cast=int)
GBC_SURFACE_GRID_DEGREE = config('GBC_SURFACE_GRID_DEGREE', default=7, cast=int)
GBC_NODE_CHUNK = config('GBC_NODE_CHUNK', default=4096, cast=int)

# Logging Configuration
os.makedirs(BASE_DIR / 'logs', exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
            'level': config('GBC_CONSOLE_LOG_LEVEL', default='WARNING'),
        },
        'file': {
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': BASE_DIR / 'logs' / 'gbcmass.log',
            'maxBytes': 10485760,  # 10MB
            'backupCount': 5,
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': 'INFO',
        },
        **{
            app: {
                'handlers': ['console', 'file'],
                'level': 'DEBUG' if DEBUG else 'INFO',
            }
            for app in INSTALLED_APPS
        },
    },
}
