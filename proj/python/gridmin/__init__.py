"""Python interface to the gridmin dispatch-optimization core."""

try:
    from ._gridmin import *  # noqa: F401,F403  (wheel layout)
    from ._gridmin import Model  # noqa: F401
except ImportError:  # in-tree build: _gridmin.so on PYTHONPATH
    from _gridmin import *  # noqa: F401,F403
    from _gridmin import Model  # noqa: F401

__all__ = ["Model"]
