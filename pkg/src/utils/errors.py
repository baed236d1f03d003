"""Exception family shared by every package under src/."""


class MascError(Exception):
    pass


class ConfigError(MascError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class FeatureError(MascError, ValueError):
    pass


class SelectionError(MascError, ValueError):
    pass


class PromptPoolError(MascError, ValueError):
    pass


class LabelError(MascError, ValueError):
    pass


class SequenceError(MascError, ValueError):
    pass


class ProviderError(MascError, RuntimeError):
    def __init__(self, provider_id, message, retriable=True):
        self.provider_id = provider_id
        self.retriable = retriable
        super().__init__(f"[{provider_id}] {message}")


class ClientError(MascError, RuntimeError):
    def __init__(self, model_id, message, attempts=0):
        self.model_id = model_id
        self.attempts = attempts
        super().__init__(f"[{model_id}] {message} (after {attempts} attempts)")


class TrainingError(MascError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class DatasetError(MascError, ValueError):
    pass
