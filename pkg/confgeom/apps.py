from django.apps import AppConfig


class ConfgeomConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "confgeom"
