class ContractViolation(RuntimeError):
    """An operation was called outside its documented precondition."""


class ConfigError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
