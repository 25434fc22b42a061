from django.test import TestCase
from django.urls import reverse
from rest_framework.test import APIClient
import json

import pytest

from harness.models import SweepRun, SweepRow

pytestmark = pytest.mark.api


class SweepRunAPITestCase(TestCase):
    """Test cases for the read-only sweep API"""

    def setUp(self):
        """Store two sweep runs with rows"""
        self.run = SweepRun.objects.create(
            design='B', start_ps=10_000, end_ps=50_000, step_ps=20_000,
            count_set_20ns=1, count_set_40ns=1, count_failed=1,
        )
        for offset, decision, bias in [(10_000, 'FAILED', 700), (50_000, 'SET_40NS', 950), (30_000, 'SET_20NS', 1800)]:
            SweepRow.objects.create(
                run=self.run, offset_ps=offset, decision=decision, bias_mV=bias,
                detect_ok=decision != 'FAILED',
            )
        self.mirrored_run = SweepRun.objects.create(
            design='B', start_ps=45_000, end_ps=45_000, step_ps=1_000, mirrored=True,
        )
        self.client = APIClient()

    def test_sweep_list(self):
        response = self.client.get(reverse('sweeprun-list'))
        self.assertEqual(response.status_code, 200)

        data = json.loads(response.content)
        self.assertEqual(data['count'], 2)

    def test_sweep_detail_rows_in_offset_order(self):
        response = self.client.get(reverse('sweeprun-detail', args=[self.run.id]))
        self.assertEqual(response.status_code, 200)

        data = json.loads(response.content)
        self.assertEqual([row['offset_ps'] for row in data['rows']], [10_000, 30_000, 50_000])
        self.assertEqual(data['rows'][0]['decision'], 'FAILED')
        self.assertFalse(data['rows'][0]['detect_ok'])
        self.assertEqual(data['count_set_40ns'], 1)

    def test_filter_by_mirrored(self):
        response = self.client.get(reverse('sweeprun-list'), {'mirrored': 'true'})
        data = json.loads(response.content)
        self.assertEqual(data['count'], 1)
        self.assertEqual(data['results'][0]['id'], self.mirrored_run.id)

    def test_missing_sweep(self):
        response = self.client.get(reverse('sweeprun-detail', args=[9999]))
        self.assertEqual(response.status_code, 404)
        self.assertEqual(json.loads(response.content)['error'], 'Not found')

    def test_api_is_read_only(self):
        """Test that sweeps cannot be created or deleted through the API"""
        response = self.client.post(reverse('sweeprun-list'), {'design': 'B'}, format='json')
        self.assertEqual(response.status_code, 405)
        self.assertEqual(json.loads(response.content)['error'], 'Method not allowed')

        response = self.client.delete(reverse('sweeprun-detail', args=[self.run.id]))
        self.assertEqual(response.status_code, 405)
        self.assertTrue(SweepRun.objects.filter(pk=self.run.pk).exists())
