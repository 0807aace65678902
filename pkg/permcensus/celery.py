import os
from celery import Celery

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "permcensus.settings")

app = Celery("permcensus")
app.config_from_object("django.conf:settings", namespace="CELERY")
app.autodiscover_tasks()

# Timezone
app.conf.timezone = "UTC"
