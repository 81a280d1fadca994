"""Exception types shared across the library."""


class BlocktreeError(Exception):
    pass


class ContractError(BlocktreeError):
    """A caller violated a documented precondition (library-bug territory)."""


class CodecError(BlocktreeError):
    """A codec was fed entries it cannot represent."""


class CorruptionError(BlocktreeError):
    """An encoded buffer failed to decode (truncated or malformed)."""


class InvariantViolation(BlocktreeError):
    """The structural validator found a broken tree."""


class GraphParseError(BlocktreeError):
    """An edge-list file failed to parse; carries the offending line number."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno
