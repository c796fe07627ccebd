from django.apps import AppConfig


class AnalogDesignConfig(AppConfig):
    name = 'analog_design'
