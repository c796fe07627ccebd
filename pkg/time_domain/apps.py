from django.apps import AppConfig


class TimeDomainConfig(AppConfig):
    name = 'time_domain'
