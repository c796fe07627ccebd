from django.apps import AppConfig


class FixedpointConfig(AppConfig):
    name = 'fixedpoint'
    verbose_name = 'Fixed-point arithmetic'
