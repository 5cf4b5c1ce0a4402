#!/usr/bin/env python3
"""Tests for environment variable support: CLI > KHT_<NAME> > YAML default."""
from pathlib import Path

import pytest

from khtorsion.argparse_conf import create_parser, create_parser_from_dict, create_parser_from_yaml
from khtorsion.errors import ConfigError
from khtorsion.models import RunConfig, parse_checks
from khtorsion.resolvers import LEVEL_NAMES, resolver_registry


def test_yaml_defaults(clean_env):
    args = create_parser().parse_args(["homology", "k.pd"])
    assert args.prime == 32003
    assert args.format == "json"
    assert args.timing is False


def test_env_vars_as_defaults(clean_env):
    clean_env.setenv("KHT_PRIME", "10007")
    clean_env.setenv("KHT_FORMAT", "text")
    clean_env.setenv("KHT_TIMING", "yes")
    args = create_parser().parse_args(["homology", "k.pd"])
    assert args.prime == 10007
    assert args.format == "text"
    assert args.timing is True


def test_command_line_overrides_env(clean_env):
    clean_env.setenv("KHT_PRIME", "10007")
    args = create_parser().parse_args(["homology", "k.pd", "--prime", "7"])
    assert args.prime == 7


def test_bad_env_value(clean_env):
    clean_env.setenv("KHT_PRIME", "many")
    with pytest.raises(ConfigError):
        create_parser()


def test_checks_from_env_are_comma_separated(clean_env):
    clean_env.setenv("KHT_CHECKS", "ribbon, theorem1")
    args = create_parser().parse_args(["movie", "m.json"])
    assert RunConfig.from_args(args).checks == ["theorem1", "ribbon"]


def test_unknown_check(clean_env):
    with pytest.raises(ConfigError):
        parse_checks("theorem1,flype")
    assert parse_checks(None) == []


def test_help_mentions_env_vars(clean_env):
    parser = create_parser()
    sub = parser._subparsers._group_actions[0].choices["homology"]
    text = sub.format_help()
    assert "[env: KHT_PRIME]" in text
    assert "[env: KHT_BASEPOINT]" in text


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(prime=9)
    with pytest.raises(ConfigError):
        RunConfig(workers=0)
    with pytest.raises(ConfigError):
        RunConfig(output_format="xml")
    assert RunConfig(prime="5").prime == 5


def test_explicit_env_var_and_resolvers(clean_env):
    clean_env.setenv("CHAR", "5")
    parser = create_parser_from_dict({
        "parser": {"prog": "kht"},
        "arguments": [
            {"name": "--prime", "type": "int", "default": "@default_prime", "env_var": "CHAR"},
            {"name": "--check", "choices": "@check_names", "default": "theorem1"},
        ],
    })
    args = parser.parse_args([])
    assert args.prime == 5
    assert args.check == "theorem1"
    with pytest.raises(SystemExit):
        parser.parse_args(["--check", "flype"])


def test_definition_errors(tmp_path, clean_env):
    with pytest.raises(ConfigError):
        create_parser_from_dict(["not", "a", "mapping"])
    with pytest.raises(ConfigError):
        create_parser_from_dict({"arguments": [{"type": "int"}]})
    with pytest.raises(ConfigError):
        create_parser_from_dict({"arguments": [{"name": "--n", "type": "complex"}]})
    broken = tmp_path / "broken.yaml"
    broken.write_text("parser: [unclosed\n")
    with pytest.raises(ConfigError):
        create_parser_from_yaml(broken)


def test_resolvers():
    assert (Path(resolver_registry.resolve_default("corpus_dir")) / "knots.json").is_file()
    assert resolver_registry.resolve_choices("output_formats") == ["json", "text"]
    levels = resolver_registry.resolve_choices("logging_levels")
    assert set(LEVEL_NAMES) <= set(levels)
    assert not resolver_registry.is_choice_resolver("@default_prime")
    with pytest.raises(ConfigError):
        resolver_registry.resolve_choices("nothing_here")
    with pytest.raises(ConfigError):
        resolver_registry.get_default_resolver_name("prime")


def test_logging_levels_without_the_level_mapping(monkeypatch):
    monkeypatch.delattr("logging.getLevelNamesMapping", raising=False)
    assert resolver_registry.resolve_choices("logging_levels") == list(LEVEL_NAMES)
