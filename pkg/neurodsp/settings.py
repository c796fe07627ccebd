"""
Django settings for the neurodsp project.
Fixed-point DSP / neuromorphic filter simulation – NeuroDSP
"""

from math import sqrt
from pathlib import Path
import os

# -------------------------------------------------
# BASE DIRECTORY
# -------------------------------------------------
BASE_DIR = Path(__file__).resolve().parent.parent


# -------------------------------------------------
# SECURITY
# -------------------------------------------------
SECRET_KEY = os.environ.get('SECRET_KEY', 'django-insecure-change-this-in-production')

DEBUG = os.environ.get('DEBUG', '0') == '1'

ALLOWED_HOSTS = os.environ.get('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')


# -------------------------------------------------
# APPLICATIONS
# -------------------------------------------------
INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    # Simulation apps
    'fixedpoint',
    'signals',
    'filters_classic',
    'analog_design',
    'neuro_core',
    'neuro_filters',
    'memristor',
    'time_domain',
    'experiments',
    'rest_framework',
]


# -------------------------------------------------
# MIDDLEWARE
# -------------------------------------------------
MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]


# -------------------------------------------------
# URL CONFIG
# -------------------------------------------------
ROOT_URLCONF = 'neurodsp.urls'


# -------------------------------------------------
# TEMPLATES (admin only)
# -------------------------------------------------
TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]


# -------------------------------------------------
# WSGI
# -------------------------------------------------
WSGI_APPLICATION = 'neurodsp.wsgi.application'


# -------------------------------------------------
# DATABASE (SQLite by default, PostgreSQL on request)
# -------------------------------------------------
if os.environ.get('NEURODSP_DB_ENGINE') == 'postgresql':
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.postgresql',
            'NAME': os.environ.get('NEURODSP_DB_NAME', 'neurodsp'),
            'USER': os.environ.get('NEURODSP_DB_USER', 'postgres'),
            'PASSWORD': os.environ.get('NEURODSP_DB_PASSWORD', ''),
            'HOST': os.environ.get('NEURODSP_DB_HOST', 'localhost'),
            'PORT': os.environ.get('NEURODSP_DB_PORT', '5432'),
        }
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': os.environ.get('NEURODSP_DB_NAME', str(BASE_DIR / 'neurodsp.sqlite3')),
        }
    }


# -------------------------------------------------
# PASSWORD VALIDATION
# -------------------------------------------------
AUTH_PASSWORD_VALIDATORS = [
    {
        'NAME': 'django.contrib.auth.password_validation.UserAttributeSimilarityValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.MinimumLengthValidator',
    },
]


# -------------------------------------------------
# INTERNATIONALIZATION
# -------------------------------------------------
LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True
USE_TZ = True


# -------------------------------------------------
# STATIC FILES
# -------------------------------------------------
STATIC_URL = '/static/'

STATIC_ROOT = BASE_DIR / 'staticfiles'


# -------------------------------------------------
# DEFAULT PRIMARY KEY
# -------------------------------------------------
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# -------------------------------------------------
# REST FRAMEWORK
# -------------------------------------------------
REST_FRAMEWORK = {
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.IsAuthenticated',
    ],
}


# -------------------------------------------------
# LOGGING
# -------------------------------------------------
NEURODSP_LOG_LEVEL = os.environ.get('NEURODSP_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': NEURODSP_LOG_LEVEL,
            'propagate': False,
        }
        for app in (
            'fixedpoint', 'signals', 'filters_classic', 'analog_design',
            'neuro_core', 'neuro_filters', 'memristor', 'time_domain',
            'experiments',
        )
    },
}


# -------------------------------------------------
# SIMULATION DEFAULTS
# -------------------------------------------------
# Every value here can be overridden by an experiment config file or a CLI
# flag of the same name.
NEURODSP = {
    # stimulus
    'FORMAT': 'q16.15',
    'AMPLITUDE': 0.6,
    'FREQ': 50.0,
    'SAMPLE_RATE': 1000.0,
    'NOISE_AMP': 0.05,
    'SEED': 1,

    # experiment
    'TRAIN_STEPS': 2000,
    'TEST_STEPS': 2000,
    'MODELS': ('fir', 'iir', 'nfir', 'niir'),

    # classical filters
    'FIR_TAPS': 15,
    'FIR_CUTOFF': 0.1,
    'IIR_CUTOFF': 0.1,
    'IIR_Q': 1 / sqrt(2),
    'IIR_FORM': 'df1',

    # neuromorphic filters
    'NFIR_HIDDEN': 8,
    'NIIR_HIDDEN': 4,
    'MU': 2.0 ** -6,
    'TANH_LUT_SIZE': 1024,
    'TANH_LUT_RANGE': 4.0,
    'ELMAN_ROW_SUM': 0.9,
    'WEIGHT_STORAGE': 'register',
    'CROSSBAR_LEVELS': 256,

    # LIF neuron
    'LIF_TAU': 0.01,
    'LIF_V_REST': 0.0,
    'LIF_R': 1.0,
    'LIF_V_TH': 1.0,
    'LIF_V_RESET': 0.0,
    'LIF_T_REF': 0.0,
    'LIF_DT': 0.001,

    # memristor (netlist K1)
    'MEM_RON': 100.0,
    'MEM_ROFF': 16000.0,
    'MEM_K': 10000.0,
    'MEM_X0': 0.3,
}
