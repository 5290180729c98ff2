import multiprocessing
from concurrent.futures import ThreadPoolExecutor

from slowpath.Logging.logger import error, info
from slowpath.Logging.terminal import CHECK, CROSS
from slowpath.TUI.text import Text


class ParallelExperimentManager:
    """
    Runs experiment tasks on a worker pool over a shared, immutable model.

    Tasks are independent; results are handed back in submission order so
    whatever the collector writes does not depend on scheduling.
    """

    def __init__(self, max_workers=None, verbose=False):
        """
        Args:
            max_workers: Maximum number of parallel workers (default: CPU count)
            verbose: Whether to log every finished task
        """
        self.verbose = verbose
        self.tasks = []
        if max_workers is None:
            self.max_workers = multiprocessing.cpu_count()
        else:
            self.max_workers = max(1, int(max_workers))

    def _run_task(self, task):
        task.execute()
        if not self.verbose:
            return task
        if task.failed:
            error(f"{CROSS} {Text.style(task.name, bold=True)} failed: {task.error}")
        else:
            info(f"{CHECK} {Text.style(task.name, bold=True)} done in {task.duration():.2f}s")
        return task

    def run(self, tasks):
        """
        Execute ``tasks`` in parallel.

        Returns:
            The same tasks, in input order, each completed or failed
        """
        self.tasks = list(tasks)
        if not self.tasks:
            return []
        if self.max_workers == 1:
            return [self._run_task(task) for task in self.tasks]
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            return list(pool.map(self._run_task, self.tasks))

    def get_failed_tasks(self):
        return [task for task in self.tasks if task.failed]
