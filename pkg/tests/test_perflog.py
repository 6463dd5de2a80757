import datetime
import logging
import unittest
from unittest import mock

from fifaug import perflog
from fifaug._private.seeds import derive_seed
from fifaug.cancellation import Cancel
from fifaug.fif import generate_fif

from .helpers import GAMMA_PREFIX


class TestPerflog(unittest.TestCase):
    def tearDown(self):
        perflog.set_timer_receiver(None)
        perflog.set_counter_receiver(None)

    def test_timer_and_counter(self):
        """Test that generating a FIF reports its duration and the number of points made."""
        timer, counter = mock.Mock(), mock.Mock()
        perflog.set_timer_receiver(timer)
        perflog.set_counter_receiver(counter)

        generate_fif(GAMMA_PREFIX, 0.2, 4)

        timer.assert_called_once_with('fif_generate', mock.ANY)
        self.assertGreaterEqual(timer.call_args[0][1], 0.0)
        counter.assert_called_once_with('fif_points', 20)

    def test_timer_fires_on_failure(self):
        timer = mock.Mock()
        perflog.set_timer_receiver(timer)

        @perflog.timed_as('failing')
        def fail():
            raise RuntimeError('boom')

        with self.assertRaises(RuntimeError):
            fail()
        timer.assert_called_once_with('failing', mock.ANY)

    def test_no_receivers(self):
        self.assertEqual(len(generate_fif(GAMMA_PREFIX, 0.2, 1)), 11)

    def test_tally_sums_per_key(self):
        tally = perflog.PerfTally().install()
        generate_fif(GAMMA_PREFIX, 0.2, 4)
        generate_fif(GAMMA_PREFIX, 0.1, 2)
        tally.uninstall()
        generate_fif(GAMMA_PREFIX, 0.1, 2)

        summary = tally.summary()
        self.assertEqual(summary['timers']['fif_generate']['calls'], 2)
        self.assertGreaterEqual(summary['timers']['fif_generate']['total_ms'], 0.0)
        self.assertEqual(summary['counters'], {'fif_points': 20 + 10})

    def test_tally_log_summary(self):
        tally = perflog.PerfTally()
        tally.record_time('adf', 2.5)
        tally.record_count('study_trials', 3)
        with self.assertLogs('fifaug.perflog', level='DEBUG') as cm:
            tally.log_summary(logging.getLogger('fifaug.perflog'))
        self.assertEqual(len(cm.output), 2)
        self.assertIn('adf: 1 calls, 2.5 ms', cm.output[0])


class TestCancellation(unittest.TestCase):
    def test_never(self):
        self.assertFalse(Cancel.never().is_cancelled())

    def test_timeout(self):
        self.assertTrue(Cancel.after_timeout(0).is_cancelled())
        self.assertFalse(Cancel.after_timeout(datetime.timedelta(hours=1)).is_cancelled())
        self.assertFalse(Cancel.after_timeout(3600).is_cancelled())


class TestSeeds(unittest.TestCase):
    def test_derived_seeds(self):
        self.assertEqual(derive_seed(3, 1, 2), derive_seed(3, 1, 2))
        self.assertNotEqual(derive_seed(3, 1), derive_seed(3, 2))
        self.assertNotEqual(derive_seed(3, 1), derive_seed(4, 1))


if __name__ == '__main__':
    unittest.main()
