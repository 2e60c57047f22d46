from django.apps import AppConfig


class MassConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "mass"
