# MIT License: Copyright (c) 2022 flecs-kit developers

import contextlib
import contextvars
from typing import Dict

#: The default values of the numerical checks flags.
DEFAULT_FLAGS = {
    'check_finite': True,
    'check_symmetric': True
}

#: Each thread sees its own flags assignments.
_flags: contextvars.ContextVar = contextvars.ContextVar('flecs_flags', default=DEFAULT_FLAGS)


def current_flags() -> Dict[str, bool]:
    """Returns a copy of the flags assignments of the current context."""
    return dict(_flags.get())


def is_check_finite_enabled() -> bool:
    """Returns whether NaN and Inf values are rejected in inputs and oracle outputs."""
    return _flags.get()['check_finite']


def is_check_symmetric_enabled() -> bool:
    """Returns whether matrices declared to be symmetric are checked."""
    return _flags.get()['check_symmetric']


class ContextState(contextlib.ContextDecorator):
    def __init__(self, **flags: bool):
        """
        Thread-safe context (or function decorator) overriding the numerical checks flags.

        Supported flags are the following:
        - check_finite: bool = True, Whether to reject NaN and Inf values in inputs and oracle outputs.
        - check_symmetric: bool = True, Whether to check matrices that are declared to be symmetric.

        :param flags: The flags assignments to override.
        :raises ValueError: If some flag is unknown.
        """
        unknown = [f for f in flags if f not in DEFAULT_FLAGS]
        if unknown:
            raise ValueError("Cannot set unknown flags called {}, suitable flags are: {}".format(
                ', '.join(unknown), ', '.join(DEFAULT_FLAGS)
            ))
        self.__overrides = {f: bool(v) for f, v in flags.items()}
        self.__tokens = []

    def __enter__(self):
        flags = current_flags()
        flags.update(self.__overrides)
        self.__tokens.append(_flags.set(flags))

    def __exit__(self, *exc):
        _flags.reset(self.__tokens.pop())
