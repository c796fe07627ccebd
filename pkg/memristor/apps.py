from django.apps import AppConfig


class MemristorConfig(AppConfig):
    name = 'memristor'
    verbose_name = 'Memristor devices'
