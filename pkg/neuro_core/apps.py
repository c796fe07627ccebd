from django.apps import AppConfig


class NeuroCoreConfig(AppConfig):
    name = 'neuro_core'
