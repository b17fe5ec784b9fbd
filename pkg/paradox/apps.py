from django.apps import AppConfig


class ParadoxConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'paradox'
    verbose_name = 'Spin-orbit Hardy paradox laboratory'
