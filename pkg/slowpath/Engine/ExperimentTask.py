import time
import traceback


class ExperimentTask:
    """
    One (case, strategy) decode to be executed by the experiment runner.
    """

    def __init__(self, case, strategy, action):
        """
        Initialize an experiment task.

        Args:
            case: Case name
            strategy: Decoding strategy name
            action: Callable returning the task result (a Transcript)
        """
        self.case = case
        self.strategy = strategy
        self.action = action
        self.result = None
        self.completed = False
        self.failed = False
        self.start_time = None
        self.end_time = None
        self.output = []
        self.error = None

    @property
    def name(self):
        return f"{self.case}__{self.strategy}"

    def execute(self):
        """Run the action and record the result or the failure."""
        self.start_time = time.time()
        try:
            self.result = self.action()
            self.completed = True
        except Exception as e:
            self.failed = True
            self.error = f"{type(e).__name__}: {e}"
            self.output.append(traceback.format_exc())
        finally:
            self.end_time = time.time()

    def duration(self):
        """Get the task execution duration in seconds."""
        if self.start_time is None:
            return 0
        end = self.end_time if self.end_time is not None else time.time()
        return end - self.start_time

    def __str__(self):
        return f"ExperimentTask({self.name})"
