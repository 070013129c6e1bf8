from django.apps import AppConfig


class TensorlinalgConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "tensorlinalg"
    verbose_name = "Dense matrix kernel"
