"""
Model: N/A (orchestration).
Purpose: Bounded worker pool for independent sweep tasks. Tasks are keyed; results come back
         in key order regardless of completion order, and a failing task never takes the
         finished ones down with it.
Dependencies: concurrent.futures, core/config.py.
Ext Hooks: A process pool would drop in behind run() for GIL-bound tasks.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, Dict, Hashable, List, Tuple

from core.config import WORKERS

logger = logging.getLogger(__name__)


class Task:
    def __init__(self, key: Hashable, callback: Callable, *args, **kwargs):
        self.key = key
        self.callback = callback
        self.args = args
        self.kwargs = kwargs

    def __lt__(self, other):
        return self.key < other.key

    def __call__(self):
        return self.callback(*self.args, **self.kwargs)


class Scheduler:
    def __init__(self, workers: int = WORKERS):
        self.workers = max(1, int(workers))
        self.tasks: List[Task] = []

    def schedule(self, key: Hashable, callback: Callable, *args, **kwargs) -> None:
        """Queue callback(*args, **kwargs) under a unique, sortable key."""
        if any(task.key == key for task in self.tasks):
            raise ValueError(f"Duplicate task key {key!r}")
        self.tasks.append(Task(key, callback, *args, **kwargs))

    def run(self) -> Tuple[Dict[Hashable, Any], Dict[Hashable, Exception]]:
        """Execute every queued task; returns (results, failures), both ordered by key."""
        tasks, self.tasks = sorted(self.tasks), []
        results: Dict[Hashable, Any] = {}
        failures: Dict[Hashable, Exception] = {}
        if self.workers == 1:
            for task in tasks:
                try:
                    results[task.key] = task()
                except Exception as e:
                    logger.error("Task %r failed: %s", task.key, e)
                    failures[task.key] = e
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                futures = {pool.submit(task): task.key for task in tasks}
                for future in as_completed(futures):
                    key = futures[future]
                    try:
                        results[key] = future.result()
                    except Exception as e:
                        logger.error("Task %r failed: %s", key, e)
                        failures[key] = e
        logger.info("Ran %d tasks on %d workers: %d failed", len(tasks), self.workers, len(failures))
        return dict(sorted(results.items())), dict(sorted(failures.items()))
