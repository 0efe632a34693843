"""Command-line entry point: ``tokq {gen-instances,uc1,uc2,uc3} [options]``.

Precedence: explicit flags > ``--config`` file > built-in defaults.
Config-validation failures exit with status 2 and a JSON error on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import TokqError
from .harness.config import PARAMS, ConfigError, build_config, load_config_file
from .harness.experiments import run_experiment

DESCRIPTIONS = {
    "gen-instances": "write the MaxCut base instance and its perturbed derivatives",
    "uc1": "seeded reverse annealing vs forward annealing on MaxCut",
    "uc2": "multitask Transfer-QAOA (none / static / evolve)",
    "uc3": "H2 VQE bond-length sweep with and without parameter transfer",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tokq", description="Transfer-of-knowledge experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, specs in PARAMS.items():
        sp = sub.add_parser(name, help=DESCRIPTIONS[name], description=DESCRIPTIONS[name],
                            argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="flat YAML/JSON key-value file (keys = flag names) or a run manifest")
        for p in specs:
            helptext = f"{p.help} (default: {p.default})"
            if p.flag_type == "bool":
                sp.add_argument(f"--{p.name}", dest=p.key, action=argparse.BooleanOptionalAction, help=helptext)
            else:
                sp.add_argument(f"--{p.name}", dest=p.key, metavar=p.name.split("-")[-1].upper(), help=helptext)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    explicit = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        merged = load_config_file(args.config) if getattr(args, "config", None) else {}
        merged = {k.replace("_", "-"): v for k, v in merged.items()}
        merged.update({k.replace("_", "-"): v for k, v in explicit.items()})
        cfg = build_config(args.command, merged)
        return run_experiment(cfg)
    except ConfigError as exc:
        print(exc.as_json(), file=sys.stderr)
        return 2
    except (TokqError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
