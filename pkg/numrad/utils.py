"""Utility functions for numrad."""

import concurrent.futures
import logging
import os
import threading
import time
from typing import Callable, Iterable, List, Optional, TypeVar

# Configure default logger
logger = logging.getLogger("numrad")

# Type variables for generic functions
T = TypeVar('T')
R = TypeVar('R')


class Timer:
    """Context manager for timing operations."""

    def __init__(self, name: str = None, verbose: bool = True):
        """
        Initialize Timer context manager.

        Args:
            name: Name of the operation being timed
            verbose: Whether to log timing information
        """
        self.name = name
        self.verbose = verbose
        self.start_time = None
        self.end_time = None

    def __enter__(self) -> 'Timer':
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, *args):
        self.end_time = time.perf_counter()
        if self.verbose:
            operation = f"'{self.name}'" if self.name else "Operation"
            logger.info(f"{operation} completed in {self.duration:.2f} seconds")

    @property
    def duration(self) -> float:
        """Elapsed seconds; still running timers report time so far."""
        if self.start_time is None:
            return 0.0
        end = self.end_time if self.end_time is not None else time.perf_counter()
        return end - self.start_time


def default_workers() -> int:
    return min(32, (os.cpu_count() or 4) + 4)


def parallel_process(items: Iterable[T],
                     process_func: Callable[[T], R],
                     max_workers: Optional[int] = 1,
                     show_progress: bool = False,
                     desc: str = "Processing") -> List[R]:
    """
    Apply ``process_func`` to every item on a thread pool, keeping input order.

    Results come back in the order of ``items`` regardless of which worker
    finishes first, so any reduction over them is schedule-independent.
    A failing item is logged; once all items have run, the exception of the
    first failing item (by position) is re-raised.

    Args:
        items: Items to process
        process_func: Function to apply to each item
        max_workers: Worker threads; 1 runs inline, None picks a default
        show_progress: Whether to show a tqdm progress bar
        desc: Progress bar label

    Returns:
        List of results aligned with ``items``
    """
    items_list = list(items)
    results: List[Optional[R]] = [None] * len(items_list)
    errors = {}

    if max_workers is None:
        max_workers = default_workers()

    pbar = None
    if show_progress:
        from tqdm import tqdm
        pbar = tqdm(total=len(items_list), desc=desc)
    lock = threading.Lock()

    def run(index: int) -> None:
        try:
            results[index] = process_func(items_list[index])
        except Exception as e:
            logger.error(f"Error processing item {index}: {e}")
            errors[index] = e
        finally:
            if pbar is not None:
                with lock:
                    pbar.update(1)

    try:
        if max_workers <= 1 or len(items_list) <= 1:
            for index in range(len(items_list)):
                run(index)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
                futures = [executor.submit(run, index) for index in range(len(items_list))]
                concurrent.futures.wait(futures)
    finally:
        if pbar is not None:
            pbar.close()

    if errors:
        raise errors[min(errors)]
    return results


def setup_logging(verbose: bool = False, log_file: Optional[str] = None) -> None:
    """
    Set up logging configuration.

    Args:
        verbose: Whether to enable debug logging
        log_file: Path to log file (optional)
    """
    log_level = logging.DEBUG if verbose else logging.INFO

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Clear any existing handlers
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(log_level)
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        try:
            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(log_level)
            file_handler.setFormatter(formatter)
            root_logger.addHandler(file_handler)
        except Exception as e:
            logger.warning(f"Unable to create log file at {log_file}: {e}")

    logging.getLogger("numrad").setLevel(log_level)
