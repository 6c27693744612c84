import os
from typing import Sequence


class CoughSpecEnv:
    """Utilities for reading and clearing COUGHSPEC_* environment variables."""

    PREFIXES = ['COUGHSPEC_']

    @staticmethod
    def get_str(name: str, default: str = '') -> str:
        """Return the value of COUGHSPEC_<name> or the default."""
        return os.getenv(f'COUGHSPEC_{name}', default)

    @staticmethod
    def get_int(name: str, default: int) -> int:
        """
        Return COUGHSPEC_<name> parsed as an integer.

        Raises:
            ValueError: If the variable is set but is not an integer.
        """
        value = os.getenv(f'COUGHSPEC_{name}')
        if value is None or value == '':
            return default
        try:
            return int(value)
        except ValueError:
            raise ValueError(
                f'COUGHSPEC_{name} must be an integer. Got: COUGHSPEC_{name}={repr(value)}'
            ) from None

    @staticmethod
    def get_float(name: str, default: float) -> float:
        """Return COUGHSPEC_<name> parsed as a float."""
        value = os.getenv(f'COUGHSPEC_{name}')
        if value is None or value == '':
            return default
        try:
            return float(value)
        except ValueError:
            raise ValueError(
                f'COUGHSPEC_{name} must be a number. Got: COUGHSPEC_{name}={repr(value)}'
            ) from None

    @classmethod
    def _clear_vars(cls, prefixes: Sequence[str]) -> int:
        """
        Remove environment variables that start with any of the specified prefixes.

        Args:
            prefixes: Sequence of string prefixes to match against variable names.

        Returns:
            int: Number of environment variables removed.
        """
        removed = 0
        for key in list(os.environ):
            if any(key.startswith(prefix) for prefix in prefixes):
                del os.environ[key]
                removed += 1
        return removed

    @classmethod
    def clear_all_vars(cls) -> int:
        """Remove all environment variables starting with COUGHSPEC_"""
        return cls._clear_vars(prefixes=cls.PREFIXES)
