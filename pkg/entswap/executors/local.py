import sys
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from multiprocessing import get_context
from typing import Any, Callable, Iterable, List, Optional

from entswap.config import create_config_section
from entswap.logging import logger

# Modes of local execution.
THREAD_MODE = "thread"
PROCESS_MODE = "process"


class LocalExecutor:
    """
    Evaluates independent work items (for example sweep grid points) on a
    local thread or process pool.

    Results are always returned in submission order, whatever order the
    workers complete in.
    """

    # Available local executor modes.
    MODES = [THREAD_MODE, PROCESS_MODE]
    START_METHODS = ["fork", "spawn", "forkserver"]
    # start_method fork is not reliable on Mac OS X. So we use forkserver as
    # a safe common default.
    # https://bugs.python.org/issue33725
    DEFAULT_START_METHOD = "forkserver"

    def __init__(self, name: str = "default", config=None, mode: str = THREAD_MODE):
        self.name = name

        # Parse config.
        if not config:
            config = create_config_section()

        self.max_workers = config.getint("max_workers", 4)
        if self.max_workers < 1:
            raise ValueError(f"max_workers must be at least 1, not {self.max_workers}")
        self.mode = config.get("mode", mode)
        if self.mode not in self.MODES:
            raise ValueError(f"Unknown mode: {self.mode}")

        self.start_method = config.get("start_method", self.DEFAULT_START_METHOD)
        if self.start_method not in self.START_METHODS:
            raise ValueError(f"Unknown start_method: {self.start_method}")

        # Pools.
        self._thread_executor: Optional[ThreadPoolExecutor] = None
        self._process_executor: Optional[ProcessPoolExecutor] = None

    def _start(self) -> Executor:
        """
        Start pool on first submission.
        """
        if self.mode == THREAD_MODE:
            if not self._thread_executor:
                self._thread_executor = ThreadPoolExecutor(max_workers=self.max_workers)
            return self._thread_executor

        if not self._process_executor:
            self._process_executor = ProcessPoolExecutor(
                max_workers=self.max_workers, mp_context=get_context(self.start_method)
            )
        return self._process_executor

    def stop(self) -> None:
        """
        Stop Executor pools.
        """
        if self._thread_executor:
            self._thread_executor.shutdown()
            self._thread_executor = None

        if self._process_executor:
            # Shutdown causes problems on python3.8
            # https://bugs.python.org/issue39995
            if (sys.version_info.major, sys.version_info.minor) != (3, 8):
                self._process_executor.shutdown()
            self._process_executor = None

    def map(self, func: Callable, items: Iterable[Any]) -> List[Any]:
        """
        Apply `func` to every item concurrently and return the ordered results.

        In process mode `func` and the items must be picklable.
        """
        items = list(items)
        if not items:
            return []

        executor = self._start()
        logger.debug(
            f"Executor {self.name}: {len(items)} items on {self.max_workers} {self.mode} workers."
        )
        futures = [executor.submit(func, item) for item in items]
        return [future.result() for future in futures]

    def __enter__(self) -> "LocalExecutor":
        return self

    def __exit__(self, *exc_info) -> None:
        self.stop()
