"""
Data models for the CLI definition file and for a resolved run configuration.
"""
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

from .algebra import DEFAULT_PRIME, check_prime
from .errors import ConfigError
from .resolvers import OUTPUT_FORMATS, resolver_registry
from .verify import CHECKS

ENV_PREFIX = "KHT_"


@dataclass
class Argument:
    """A single argument of the CLI definition file."""
    name: str
    short: Optional[str] = None
    type: Optional[str] = None
    action: Optional[str] = None
    choices: Optional[Union[List[str], str]] = None
    default: Optional[Any] = None
    required: Optional[bool] = None
    nargs: Optional[Union[str, int]] = None
    help: Optional[str] = None
    dest: Optional[str] = None
    metavar: Optional[str] = None
    env_var: Optional[str] = None

    @property
    def is_option(self) -> bool:
        return self.name.startswith('-')

    def resolve_choices(self) -> Optional[List[Any]]:
        """Resolve choices using built-in resolvers if needed."""
        if self.choices is None:
            return None

        if resolver_registry.is_choice_resolver(self.choices):
            resolver_name = resolver_registry.get_choice_resolver_name(self.choices)
            return resolver_registry.resolve_choices(resolver_name)

        if isinstance(self.choices, list):
            return self.choices

        return [str(self.choices)]

    def resolve_default(self) -> Any:
        """Resolve default value using built-in resolvers if needed."""
        if self.default is None:
            return None

        if resolver_registry.is_default_resolver(self.default):
            resolver_name = resolver_registry.get_default_resolver_name(self.default)
            return resolver_registry.resolve_default(resolver_name)

        return self.default

    @property
    def env_var_name(self) -> Optional[str]:
        """Explicit env_var, else KHT_ plus the flag name; None for positionals."""
        if self.env_var:
            return self.env_var
        if not self.is_option:
            return None
        return self._generate_env_var_name(self.name)

    def resolve_env_var(self) -> Any:
        """Value from the environment, converted to the argument's type, or None."""
        env_name = self.env_var_name
        if env_name is None:
            return None
        env_value = os.getenv(env_name)
        if env_value is None:
            return None
        return self._convert_env_value(env_value)

    @staticmethod
    def _generate_env_var_name(arg_name: str) -> str:
        return ENV_PREFIX + arg_name.lstrip('-').upper().replace('-', '_')

    def _convert_env_value(self, env_value: str) -> Any:
        if not env_value:
            return env_value

        if self.action in ('store_true', 'store_false'):
            return env_value.lower() in ('true', '1', 'yes', 'on')

        if self.type == 'int':
            try:
                return int(env_value)
            except ValueError:
                raise ConfigError(f"{self.env_var_name}={env_value!r} is not an integer")
        if self.type == 'float':
            try:
                return float(env_value)
            except ValueError:
                raise ConfigError(f"{self.env_var_name}={env_value!r} is not a number")
        if self.type == 'bool':
            return env_value.lower() in ('true', '1', 'yes', 'on')

        return env_value

    def get_effective_default(self) -> Any:
        """Default after precedence: environment variable > YAML default > None."""
        env_value = self.resolve_env_var()
        if env_value is not None:
            return env_value
        return self.resolve_default()


@dataclass
class Subcommand:
    description: Optional[str] = None
    help: Optional[str] = None
    arguments: List[Argument] = field(default_factory=list)


@dataclass
class SubcommandConfig:
    title: Optional[str] = None
    description: Optional[str] = None
    dest: Optional[str] = None
    commands: Dict[str, Subcommand] = field(default_factory=dict)


@dataclass
class ParserConfig:
    prog: Optional[str] = None
    description: Optional[str] = None
    epilog: Optional[str] = None


@dataclass
class ArgumentConfig:
    """The whole CLI definition file."""
    parser: ParserConfig = field(default_factory=ParserConfig)
    parent_arguments: List[Argument] = field(default_factory=list)
    arguments: List[Argument] = field(default_factory=list)
    subcommands: Optional[SubcommandConfig] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ArgumentConfig':
        """Create an ArgumentConfig from the parsed YAML mapping.

        Raises:
            ConfigError: if the mapping is not shaped like a CLI definition.
        """
        if not isinstance(data, dict):
            raise ConfigError("CLI definition must be a mapping")
        config = cls()

        if 'parser' in data:
            parser_data = data['parser'] or {}
            config.parser = ParserConfig(
                prog=parser_data.get('prog'),
                description=parser_data.get('description'),
                epilog=parser_data.get('epilog')
            )

        config.parent_arguments = [cls._parse_argument(a) for a in data.get('parent_arguments') or []]
        config.arguments = [cls._parse_argument(a) for a in data.get('arguments') or []]

        if data.get('subcommands') is not None:
            config.subcommands = cls._parse_subcommands(data['subcommands'])

        return config

    @staticmethod
    def _parse_argument(arg_data: Dict[str, Any]) -> Argument:
        if not isinstance(arg_data, dict) or not arg_data.get('name'):
            raise ConfigError(f"argument entry needs a 'name': {arg_data!r}")
        return Argument(
            name=arg_data['name'],
            short=arg_data.get('short'),
            type=arg_data.get('type'),
            action=arg_data.get('action'),
            choices=arg_data.get('choices'),
            default=arg_data.get('default'),
            required=arg_data.get('required'),
            nargs=arg_data.get('nargs'),
            help=arg_data.get('help'),
            dest=arg_data.get('dest'),
            metavar=arg_data.get('metavar'),
            env_var=arg_data.get('env_var')
        )

    @staticmethod
    def _parse_subcommands(subcommands_data: Dict[str, Any]) -> SubcommandConfig:
        subcommand_config = SubcommandConfig(
            title=subcommands_data.get('title'),
            description=subcommands_data.get('description'),
            dest=subcommands_data.get('dest')
        )

        for cmd_name, cmd_data in (subcommands_data.get('commands') or {}).items():
            cmd_data = cmd_data or {}
            subcommand_config.commands[cmd_name] = Subcommand(
                description=cmd_data.get('description'),
                help=cmd_data.get('help'),
                arguments=[ArgumentConfig._parse_argument(a) for a in cmd_data.get('arguments') or []]
            )

        return subcommand_config


def parse_checks(value: Union[None, str, Sequence[str]]) -> List[str]:
    """Split a comma separated check list, keeping the canonical order.

    Raises:
        ConfigError: for an unknown check name.
    """
    if value is None:
        return []
    names = value.split(',') if isinstance(value, str) else list(value)
    names = [n.strip() for n in names if n and n.strip()]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown check(s) {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    return [c for c in CHECKS if c in names]


@dataclass
class RunConfig:
    """Settings shared by every command, after CLI/env/YAML precedence is applied."""
    prime: int = DEFAULT_PRIME
    basepoint: Optional[int] = None
    output_format: str = "json"
    log_level: str = "WARNING"
    checks: List[str] = field(default_factory=list)
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        self.prime = check_prime(self.prime)
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output format must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.basepoint is not None and self.basepoint < 1:
            raise ConfigError(f"basepoint must be a positive arc label, got {self.basepoint}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        self.checks = parse_checks(self.checks)

    @classmethod
    def from_args(cls, args) -> 'RunConfig':
        """Build from an argparse namespace; missing attributes keep their defaults."""
        values = {
            'prime': getattr(args, 'prime', None),
            'basepoint': getattr(args, 'basepoint', None),
            'output_format': getattr(args, 'format', None),
            'log_level': getattr(args, 'log_level', None),
            'checks': getattr(args, 'checks', None),
            'workers': getattr(args, 'workers', None),
            'timing': getattr(args, 'timing', None),
        }
        return cls(**{k: v for k, v in values.items() if v is not None})

    def to_json(self) -> Dict[str, Any]:
        return {
            "prime": self.prime,
            "basepoint": self.basepoint,
            "format": self.output_format,
            "checks": list(self.checks),
            "workers": self.workers,
        }
