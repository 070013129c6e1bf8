from django.apps import AppConfig


class MallowsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "mallows"
    verbose_name = "Mallows metric and bound checks"
