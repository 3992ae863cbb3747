"""Console logging for monocc.

Messages are tagged (``[CARVE] ...``) and only printed when verbose mode is
on. Verbose mode is a process-wide flag toggled by the CLI's ``--quiet``.
"""

_VERBOSE = True


def set_verbose(verbose: bool) -> None:
    """Set verbose mode globally."""
    global _VERBOSE
    _VERBOSE = verbose


def is_verbose() -> bool:
    """Return whether tagged messages are printed."""
    return _VERBOSE


def log(tag: str, message: str) -> None:
    """
    Print a tagged message when verbose mode is on.

    Args:
        tag: Short upper-case subsystem tag, e.g. ``"RENDER"``.
        message: Message text.
    """
    if _VERBOSE:
        print(f"[{tag}] {message}")
