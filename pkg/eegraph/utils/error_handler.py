"""Error types, exit codes and the CLI error-handling decorator."""
import sys
from functools import wraps
from typing import Any, Callable

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGENCE = 3


class EEGraphError(Exception):
    """Base class for every error raised by the library."""
    exit_code = EXIT_DATA


class UsageError(EEGraphError):
    """Bad command-line input, edge-policy string or config value."""
    exit_code = EXIT_USAGE


class DataError(EEGraphError):
    """Dataset, montage or checkpoint content is invalid."""
    exit_code = EXIT_DATA


class ManifestError(DataError):
    pass


class PayloadSizeError(DataError):
    def __init__(self, what: str, expected: int, actual: int):
        super().__init__(f"{what}: expected {expected} bytes, found {actual}")
        self.expected = expected
        self.actual = actual


class NonFiniteError(DataError):
    pass


class UnsupportedVersionError(DataError):
    pass


class MontageError(DataError):
    pass


class CheckpointError(DataError):
    pass


class ClassCountMismatchError(DataError):
    pass


class ShapeError(EEGraphError, ValueError):
    """Operand shapes do not conform for a tensor primitive."""

    def __init__(self, primitive: str, *shapes: Any, detail: str = ""):
        shape_text = " and ".join(str(tuple(s)) for s in shapes)
        message = f"{primitive}: incompatible shapes {shape_text}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.primitive = primitive
        self.shapes = shapes


class GraphError(EEGraphError, ValueError):
    pass


class MissingGradientError(EEGraphError, RuntimeError):
    pass


class TrainingDivergenceError(EEGraphError):
    exit_code = EXIT_DIVERGENCE

    def __init__(self, epoch: int, step: int, value: float):
        super().__init__(f"non-finite loss {value} at epoch {epoch}, step {step}")
        self.epoch = epoch
        self.step = step


def handle_command_errors(logger_factory: Callable[[], Any]) -> Callable:
    """
    Decorator mapping library errors raised by a CLI command to exit codes.

    Args:
        logger_factory: Callable returning the logger used for tracebacks

    Returns:
        Decorated function returning an integer exit code
    """
    def decorator(func: Callable[..., int]) -> Callable[..., int]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> int:
            logger = logger_factory()
            try:
                result = func(*args, **kwargs)
                return EXIT_OK if result is None else result
            except KeyboardInterrupt:
                print("\n⚠️  Operation interrupted by user.", file=sys.stderr)
                return EXIT_USAGE
            except EEGraphError as e:
                print(f"❌ Error: {e}", file=sys.stderr)
                logger.debug("command failed", exc_info=True)
                return e.exit_code
            except (FileNotFoundError, IsADirectoryError) as e:
                print(f"❌ Error: {e}", file=sys.stderr)
                logger.debug("command failed", exc_info=True)
                return EXIT_DATA
        return wrapper
    return decorator
