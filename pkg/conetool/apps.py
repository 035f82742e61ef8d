from django.apps import AppConfig


class ConetoolConfig(AppConfig):
    name = 'conetool'
    verbose_name = 'conetool'

    def ready(self):
        # Import system checks so that Django registers them.
        from . import checks  # noqa
        return
