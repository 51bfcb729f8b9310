"""
Django settings for core project.

Generated by 'django-admin startproject' using Django 5.2.4 and reduced to what
the zerofield management commands need: no database, no URLs, no templates.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-zerofield-dev-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'zerofield.apps.ZerofieldConfig',
]

# Sem banco de dados: os comandos só fazem álgebra linear
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'America/Recife'

USE_I18N = True

USE_TZ = True


# Zero-field control settings

# Número de threads para avaliar a grade de durações (1 = sequencial)
ZF_WORKERS = config('ZF_WORKERS', default=1, cast=int)

# Pontos por período da oscilação mais rápida na busca de pulsos pi
ZF_GRID_POINTS_PER_PERIOD = config('ZF_GRID_POINTS_PER_PERIOD', default=40, cast=int)

# Resolução do refinamento por seção áurea, em segundos
ZF_GOLDEN_TOLERANCE = config('ZF_GOLDEN_TOLERANCE', default=1e-9, cast=float)

# Limite superior da janela padrão de busca de pulsos pi, em segundos
ZF_PI_SEARCH_MAX = config('ZF_PI_SEARCH_MAX', default=5e-3, cast=float)

ZF_DEFAULT_FIELD = config('ZF_DEFAULT_FIELD', default='9G')


# Logging

LOG_LEVEL = config('LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'padrao': {
            'format': '%(asctime)s - %(levelname)s - %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'padrao',
        },
    },
    'loggers': {
        'zerofield': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'core': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
