"""Command-line front end.

Subcommands
-----------
run           execute one experiment config and write its CSV
validate      check a config and report problems without running it
list-presets  show the bundled preset configs

Configs are flat YAML mappings, one experiment per file.  ``--config``
takes a file path, or the bare name of a bundled preset (with or without
the .yaml suffix).  ``run`` prints the output CSV path on success;
warnings and errors go to stderr.  Exit status is 0 on success and 1 on
any config or runtime error.
"""

import argparse
import os
import sys
from importlib import resources

import yaml

from .experiments import ConfigError, run_config, validate_config

__all__ = ["main"]


def _load_yaml(name):
    if not os.path.exists(name) and os.sep not in str(name):
        wanted = name if str(name).endswith(".yaml") else f"{name}.yaml"
        for p in _preset_files():
            if p.name == wanted:
                return _parse_yaml(p.read_text(encoding="utf-8"), name)
        raise ConfigError(
            [f"{name}: no such file and no bundled preset of that name "
             f"(see `filtermix list-presets`)"])
    with open(name, "r", encoding="utf-8") as fh:
        return _parse_yaml(fh.read(), name)


def _parse_yaml(text, origin):
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigError([f"{origin}: expected a YAML mapping at top level"])
    return data


def _preset_files():
    root = resources.files(__package__) / "presets"
    return sorted((p for p in root.iterdir() if p.name.endswith(".yaml")),
                  key=lambda p: p.name)


def _cmd_run(args):
    raw = _load_yaml(args.config)
    path, warnings = run_config(raw, args.out, runs=args.runs, seed=args.seed)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(path)
    return 0


def _cmd_validate(args):
    raw = _load_yaml(args.config)
    cfg, warnings = validate_config(raw)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"ok: {cfg['experiment']} config {cfg['name']!r}")
    return 0


def _cmd_list_presets(_args):
    for p in _preset_files():
        data = yaml.safe_load(p.read_text(encoding="utf-8"))
        print(f"{p.name}: {data.get('experiment', '?')}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="filtermix",
        description="Run adaptive-filter combination experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("--config", required=True,
                       help="YAML config file or bundled preset name")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--runs", type=int, default=None,
                       help="override the number of independent runs")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the base seed")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("--config", required=True,
                       help="YAML config file or bundled preset name")
    p_val.set_defaults(func=_cmd_validate)

    p_list = sub.add_parser("list-presets", help="list bundled preset configs")
    p_list.set_defaults(func=_cmd_list_presets)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, yaml.YAMLError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
