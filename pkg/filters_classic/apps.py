from django.apps import AppConfig


class FiltersClassicConfig(AppConfig):
    name = 'filters_classic'
    verbose_name = 'Classical filters'
