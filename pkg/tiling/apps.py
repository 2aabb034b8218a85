from django.apps import AppConfig


class TilingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'tiling'
