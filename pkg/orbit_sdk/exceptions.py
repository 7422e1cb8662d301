class ExperimentError(Exception):
    """Exception for user errors invoking experiments."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)
