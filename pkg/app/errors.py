from typing import Optional


class HoloquiltError(ValueError):
    """Base class for every failure raised by the library.

    `code` is a stable identifier that the CLI and the HTTP API report
    alongside the human readable message.
    """

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# Raster I/O

class InputFileNotFound(HoloquiltError):
    code = "file-not-found"

    def __init__(self, path):
        super().__init__(f"File not found: {path}")
        self.path = path


class DecodeFailure(HoloquiltError):
    code = "decode-failure"


class UnsupportedBitDepth(HoloquiltError):
    code = "unsupported-bit-depth"

    def __init__(self, path, bit_depth: int):
        super().__init__(f"{path}: {bit_depth}-bit samples are not supported (8-bit only)")
        self.path = path
        self.bit_depth = bit_depth


class IOFailure(HoloquiltError):
    code = "io-failure"


class OddWidthError(HoloquiltError):
    code = "odd-width"

    def __init__(self, width: int):
        super().__init__(f"Side-by-side frame width must be even, got {width}")
        self.width = width


# Calibration / config parsing

class MalformedJSON(HoloquiltError):
    code = "malformed-json"


class MissingField(HoloquiltError):
    code = "missing-field"

    def __init__(self, name: str):
        super().__init__(f"Missing field '{name}'")
        self.name = name


class InvariantViolation(HoloquiltError):
    code = "invariant-violation"

    def __init__(self, name: str, detail: str = ""):
        message = f"Invalid value for '{name}'"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.name = name


class ConfigSyntaxError(HoloquiltError):
    code = "syntax-error"

    def __init__(self, line: int, detail: str = ""):
        super().__init__(f"Syntax error on line {line}" + (f": {detail}" if detail else ""))
        self.line = line


class MissingSection(HoloquiltError):
    code = "missing-section"

    def __init__(self, name: str):
        super().__init__(f"Missing section [{name}]")
        self.name = name


class ConflictingSources(HoloquiltError):
    code = "conflicting-sources"


# Geometry

class LayoutParseError(HoloquiltError):
    code = "parse-error"


class CountMismatch(HoloquiltError):
    code = "count-mismatch"

    def __init__(self, expected: int, found: int, what: str = "views"):
        super().__init__(f"expected {expected} {what}, found {found}")
        self.expected = expected
        self.found = found


class DimensionMismatch(HoloquiltError):
    code = "dimension-mismatch"

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


# .map files

class BadMagic(HoloquiltError):
    code = "bad-magic"


class VersionMismatch(HoloquiltError):
    code = "version-mismatch"


class TruncatedFile(HoloquiltError):
    code = "truncated-file"


class EntryOutOfRange(HoloquiltError):
    code = "entry-out-of-range"


# Morphing

class DegenerateImage(HoloquiltError):
    code = "degenerate-image"


class TOutOfRange(HoloquiltError):
    code = "t-out-of-range"

    def __init__(self, t: float):
        super().__init__(f"Morph parameter t must lie in [0, 1], got {t}")
        self.t = t


# Streaming

class EmptySource(HoloquiltError):
    code = "empty-source"


class StreamAborted(HoloquiltError):
    code = "io-failure"

    def __init__(self, completed: int, cause: Exception):
        super().__init__(f"Stream aborted after {completed} frame(s): {cause}")
        self.completed = completed
        self.cause = cause
