from rest_framework import viewsets, filters
from django_filters.rest_framework import DjangoFilterBackend

from .models import SweepRun
from .serializers import SweepRunSerializer


class SweepRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    API endpoint that exposes stored sweep runs.

    This viewset provides `list` and `retrieve` actions only; runs are
    created by the `sweep` management command. Each run embeds its rows in
    offset order.
    """
    queryset = SweepRun.objects.prefetch_related('rows').order_by('-created_at')
    serializer_class = SweepRunSerializer
    filter_backends = [DjangoFilterBackend, filters.OrderingFilter]
    filterset_fields = ['design', 'mirrored']
    ordering_fields = ['created_at', 'start_ps']
