"""Error taxonomy shared by the whole workbench.

The CLI maps these onto exit codes: InputError -> 1, ResourceError -> 2,
DefectError -> 3.  A DefectError means an internal cross-check failed and
must never fire on a correct build.
"""


class InputError(ValueError):
    """Bad user input: unknown vertex, malformed file, arity violation."""


class ResourceError(RuntimeError):
    """A configured enumeration cap was exceeded; the message names the bound."""


class DefectError(RuntimeError):
    """Internal consistency failure (e.g. the three R^ue definitions disagree)."""
