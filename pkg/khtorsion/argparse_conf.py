"""
Parser builder that turns the YAML CLI definition into argparse objects.
"""
import argparse
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import yaml

from .errors import ConfigError
from .models import Argument, ArgumentConfig, Subcommand, SubcommandConfig

CLI_DEFINITION = Path(__file__).parent / "data" / "khtorsion-argparse.yaml"


def _bool(value: str) -> bool:
    return value.lower() in ('true', '1', 'yes', 'on')


_TYPES: Dict[str, Callable[[str], Any]] = {
    'str': str,
    'int': int,
    'float': float,
    'bool': _bool,
}


class ArgumentParser:
    """Builds argparse.ArgumentParser from an ArgumentConfig."""

    def __init__(self, config: ArgumentConfig):
        self.config = config
        self._parent_parser: Optional[argparse.ArgumentParser] = None

    def build(self) -> argparse.ArgumentParser:
        self._parent_parser = self._create_parent_parser()

        parents = [self._parent_parser] if self._parent_parser else []
        main_parser = argparse.ArgumentParser(
            prog=self.config.parser.prog,
            description=self.config.parser.description,
            epilog=self.config.parser.epilog,
            parents=parents,
        )

        if self.config.subcommands:
            self._add_subcommands(main_parser, self.config.subcommands)
        else:
            self._add_arguments(main_parser, self.config.arguments)

        return main_parser

    def _create_parent_parser(self) -> Optional[argparse.ArgumentParser]:
        if not self.config.parent_arguments:
            return None
        parent = argparse.ArgumentParser(add_help=False)
        self._add_arguments(parent, self.config.parent_arguments)
        return parent

    def _add_arguments(self, parser: argparse.ArgumentParser, arguments: List[Argument]):
        for arg in arguments:
            self._add_single_argument(parser, arg)

    def _add_single_argument(self, parser: argparse.ArgumentParser, arg: Argument):
        names = [arg.name]
        if arg.short:
            names.append(arg.short)

        kwargs: Dict[str, Any] = {}

        if arg.type:
            kwargs['type'] = self._get_type_converter(arg.type)

        if arg.action:
            kwargs['action'] = arg.action

        resolved_choices = arg.resolve_choices()
        if resolved_choices:
            kwargs['choices'] = resolved_choices

        # precedence: command line > environment > YAML default
        effective_default = arg.get_effective_default()
        if effective_default is not None:
            kwargs['default'] = effective_default

        if arg.required is not None:
            kwargs['required'] = arg.required and effective_default is None

        if arg.nargs is not None:
            kwargs['nargs'] = arg.nargs

        if arg.help:
            help_text = arg.help
            if arg.env_var_name:
                help_text += f" [env: {arg.env_var_name}]"
            kwargs['help'] = help_text

        if arg.dest:
            kwargs['dest'] = arg.dest

        if arg.metavar:
            kwargs['metavar'] = arg.metavar

        parser.add_argument(*names, **kwargs)

    @staticmethod
    def _get_type_converter(type_name: str) -> Callable[[str], Any]:
        try:
            return _TYPES[type_name]
        except KeyError:
            raise ConfigError(f"Unknown type: {type_name}")

    def _add_subcommands(self, parser: argparse.ArgumentParser, subcommands_config: SubcommandConfig):
        subparsers = parser.add_subparsers(
            title=subcommands_config.title,
            description=subcommands_config.description,
            dest=subcommands_config.dest
        )

        for cmd_name, cmd_config in subcommands_config.commands.items():
            self._add_single_subcommand(subparsers, cmd_name, cmd_config)

    def _add_single_subcommand(self, subparsers, cmd_name: str, cmd_config: Subcommand):
        parents = [self._parent_parser] if self._parent_parser else []
        subparser = subparsers.add_parser(
            cmd_name,
            description=cmd_config.description,
            help=cmd_config.help,
            parents=parents,
        )
        self._add_arguments(subparser, cmd_config.arguments)


def create_parser_from_yaml(yaml_file: Union[str, Path]) -> argparse.ArgumentParser:
    """Create an argparse.ArgumentParser from a YAML CLI definition file.

    Args:
        yaml_file: path to the definition; see
            ``khtorsion/data/khtorsion-argparse.yaml`` for the format.

    Raises:
        FileNotFoundError: if the file does not exist.
        ConfigError: if the file is not valid YAML or not a CLI definition.
    """
    with open(yaml_file, 'r') as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{yaml_file}: {e}")
    return create_parser_from_dict(data)


def create_parser_from_dict(data: Dict[str, Any]) -> argparse.ArgumentParser:
    """Create an argparse.ArgumentParser from an already loaded CLI definition.

    Example:
        >>> parser = create_parser_from_dict({
        ...     'parser': {'prog': 'kht'},
        ...     'arguments': [{'name': '--prime', 'type': 'int', 'default': '@default_prime'}],
        ... })
        >>> parser.parse_args([]).prime
        32003
    """
    config = ArgumentConfig.from_dict(data)
    return ArgumentParser(config).build()


def create_parser() -> argparse.ArgumentParser:
    """The parser of the ``khtorsion`` command, built from the bundled definition."""
    return create_parser_from_yaml(CLI_DEFINITION)
