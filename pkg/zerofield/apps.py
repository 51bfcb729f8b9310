from django.apps import AppConfig


class ZerofieldConfig(AppConfig):
    name = 'zerofield'
    verbose_name = 'Zero-field NMR control'
