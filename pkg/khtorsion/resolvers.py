"""
Built-in resolvers for dynamic values in the CLI definition file.
"""
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List

from .algebra import DEFAULT_PRIME
from .errors import ConfigError
from .verify import CHECKS

OUTPUT_FORMATS = ("json", "text")
LEVEL_NAMES = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG", "NOTSET")


class ChoiceResolvers:
    """Built-in resolvers for argument choices."""

    @staticmethod
    def logging_levels() -> List[str]:
        """Names of the standard logging levels."""
        if hasattr(logging, "getLevelNamesMapping"):
            return list(logging.getLevelNamesMapping())
        return list(LEVEL_NAMES)

    @staticmethod
    def output_formats() -> List[str]:
        return list(OUTPUT_FORMATS)

    @staticmethod
    def check_names() -> List[str]:
        """Checks `khtorsion movie --checks` accepts."""
        return list(CHECKS)


class DefaultResolvers:
    """Built-in resolvers for argument defaults."""

    @staticmethod
    def default_prime() -> int:
        return DEFAULT_PRIME

    @staticmethod
    def corpus_dir() -> str:
        """Directory of the bundled knot table and movie corpus."""
        return str(Path(__file__).parent / "corpus")


class ResolverRegistry:
    """Registry for all built-in resolvers."""

    def __init__(self):
        self._choice_resolvers: Dict[str, Callable[[], List[Any]]] = {}
        self._default_resolvers: Dict[str, Callable[[], Any]] = {}
        self._register_builtin_resolvers()

    def _register_builtin_resolvers(self):
        for name in dir(ChoiceResolvers):
            if not name.startswith('_'):
                resolver = getattr(ChoiceResolvers, name)
                if callable(resolver):
                    self._choice_resolvers[name] = resolver

        for name in dir(DefaultResolvers):
            if not name.startswith('_'):
                resolver = getattr(DefaultResolvers, name)
                if callable(resolver):
                    self._default_resolvers[name] = resolver

    def resolve_choices(self, resolver_name: str) -> List[Any]:
        if resolver_name not in self._choice_resolvers:
            raise ConfigError(f"Unknown choice resolver: {resolver_name}")
        return self._choice_resolvers[resolver_name]()

    def resolve_default(self, resolver_name: str) -> Any:
        if resolver_name not in self._default_resolvers:
            raise ConfigError(f"Unknown default resolver: {resolver_name}")
        return self._default_resolvers[resolver_name]()

    def is_choice_resolver(self, value: Any) -> bool:
        """Check if a value is a choice resolver pattern (@resolver_name)."""
        return isinstance(value, str) and value.startswith('@') and value[1:] in self._choice_resolvers

    def is_default_resolver(self, value: Any) -> bool:
        """Check if a value is a default resolver pattern (@resolver_name)."""
        return isinstance(value, str) and value.startswith('@') and value[1:] in self._default_resolvers

    def get_choice_resolver_name(self, value: str) -> str:
        if self.is_choice_resolver(value):
            return value[1:]
        raise ConfigError(f"Not a valid choice resolver pattern: {value}")

    def get_default_resolver_name(self, value: str) -> str:
        if self.is_default_resolver(value):
            return value[1:]
        raise ConfigError(f"Not a valid default resolver pattern: {value}")


resolver_registry = ResolverRegistry()
