from django.apps import AppConfig


class HorizonConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "horizon"
