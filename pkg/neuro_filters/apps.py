from django.apps import AppConfig


class NeuroFiltersConfig(AppConfig):
    name = 'neuro_filters'
    verbose_name = 'Neuromorphic filters'
