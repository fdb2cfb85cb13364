"""Tests for the utils module."""

import logging
import threading
import time

import pytest

from numrad.utils import Timer, parallel_process, setup_logging


class TestTimer:
    def test_measures_duration(self):
        """Test the timer records elapsed time."""
        with Timer("sleep", verbose=False) as timer:
            time.sleep(0.01)
        assert timer.duration >= 0.01

    def test_unstarted(self):
        """Test an unstarted timer reports zero."""
        assert Timer().duration == 0.0

    def test_logs_when_verbose(self, caplog):
        """Test a verbose timer logs its name."""
        with caplog.at_level(logging.INFO, logger="numrad"):
            with Timer("suite"):
                pass
        assert "'suite' completed" in caplog.text


class TestParallelProcess:
    def test_keeps_input_order(self):
        """Test results line up with the inputs even when workers finish out of order."""
        def slow_square(x):
            time.sleep(0.001 * (5 - x))
            return x * x

        assert parallel_process(range(5), slow_square, max_workers=4) == [0, 1, 4, 9, 16]

    def test_inline_when_single_worker(self):
        """Test one worker runs everything on the calling thread."""
        threads = parallel_process(range(3), lambda _: threading.get_ident(), max_workers=1)
        assert set(threads) == {threading.get_ident()}

    def test_empty(self):
        """Test an empty input gives an empty result."""
        assert parallel_process([], lambda x: x, max_workers=2) == []

    def test_first_error_is_raised(self, caplog):
        """Test every item runs and the earliest failure is re-raised."""
        seen = []

        def process(x):
            seen.append(x)
            if x in (1, 3):
                raise ValueError(f"bad {x}")
            return x

        with pytest.raises(ValueError, match="bad 1"):
            parallel_process(range(5), process, max_workers=3)
        assert sorted(seen) == [0, 1, 2, 3, 4]
        assert "Error processing item" in caplog.text

    def test_progress_bar(self, mocker):
        """Test the tqdm bar advances once per item."""
        bar = mocker.MagicMock()
        mocker.patch("tqdm.tqdm", return_value=bar)
        parallel_process(range(4), lambda x: x, max_workers=2, show_progress=True, desc="Trials")
        assert bar.update.call_count == 4
        bar.close.assert_called_once()


class TestSetupLogging:
    def test_verbose_sets_debug(self):
        """Test verbose mode lowers the package logger to DEBUG."""
        setup_logging(verbose=True)
        assert logging.getLogger("numrad").level == logging.DEBUG
        setup_logging(verbose=False)
        assert logging.getLogger("numrad").level == logging.INFO

    def test_log_file(self, tmp_path):
        """Test a log file handler is attached."""
        log_file = tmp_path / "numrad.log"
        setup_logging(log_file=str(log_file))
        logging.getLogger("numrad").info("hello")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "hello" in log_file.read_text()
