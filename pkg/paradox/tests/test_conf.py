import os
from unittest import mock

from django.conf import ENVIRONMENT_VARIABLE, LazySettings
from django.test import SimpleTestCase

from paradox.conf import lab_setting


class LabSettingTests(SimpleTestCase):
    def test_settings_module_is_read_before_setup(self):
        with mock.patch('paradox.conf.settings', LazySettings()) as fresh, \
                mock.patch.dict(os.environ, {ENVIRONMENT_VARIABLE: 'hardylab.settings'}):
            self.assertFalse(fresh.configured)
            self.assertEqual(lab_setting('HARDYLAB_VERSION', '0'), '1.0.0')

    def test_default_without_settings_module(self):
        with mock.patch('paradox.conf.settings', LazySettings()), mock.patch.dict(os.environ):
            os.environ.pop(ENVIRONMENT_VARIABLE, None)
            self.assertEqual(lab_setting('HARDYLAB_VERSION', '0'), '0')

    def test_unknown_setting_falls_back(self):
        self.assertEqual(lab_setting('HARDYLAB_NOT_A_SETTING', 7), 7)
