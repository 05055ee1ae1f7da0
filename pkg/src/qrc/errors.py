"""Exception hierarchy shared by all modules."""


class QRCError(Exception):
    pass


class ConfigurationError(QRCError, ValueError):
    """Invalid or unsupported configuration (CLI exit code 2)."""


class DomainError(QRCError, ValueError):
    pass


class ContractError(QRCError, ValueError):
    """An input violates an operation's precondition."""


class CapacityError(QRCError, ValueError):
    pass


class AlignmentError(QRCError, ValueError):
    pass


class FormatError(QRCError, ValueError):
    pass
