"""
URL configuration for seqlearn project.

Only the admin and the read-only sweep API are served; simulations run
through the management commands.
"""
from django.contrib import admin
from django.urls import path, include
from rest_framework.routers import DefaultRouter

from harness.api import SweepRunViewSet

# Create API router
router = DefaultRouter()
router.register(r'sweeps', SweepRunViewSet)

urlpatterns = [
    path('admin/', admin.site.urls),

    # REST API endpoints
    path('api/', include(router.urls)),
]
