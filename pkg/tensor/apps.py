from django.apps import AppConfig


class TensorConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "tensor"
