# config/celery.py

import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')

app = Celery('selfaffine_spectrum')

# CELERY_* settings; tasks run eager unless CELERY_TASK_ALWAYS_EAGER is off
app.config_from_object('django.conf:settings', namespace='CELERY')
app.conf.task_routes = {'spectrum.tasks.screen_wave_vectors': {'queue': 'screening'}}

app.autodiscover_tasks()
