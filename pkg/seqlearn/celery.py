import os
from celery import Celery

# Set default Django settings module
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'seqlearn.settings')

# Create Celery app
app = Celery('seqlearn')

# Read config from Django settings
app.config_from_object('django.conf:settings', namespace='CELERY')

# Load sweep tasks from all registered Django apps
app.autodiscover_tasks()
