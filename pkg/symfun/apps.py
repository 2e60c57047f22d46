from django.apps import AppConfig


class SymfunConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "symfun"
