from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from pydantic import ValidationError as PydanticValidationError

from channel_inference.config import load_settings
from channel_inference.constants import EXIT_MATH, EXIT_OK, EXIT_VALIDATION, OUTPUT_FORMATS
from channel_inference.errors import MathError, ValidationError
from channel_inference.logging_setup import setup_logging
from channel_inference.queries import QuerySpec, run_query

logger = logging.getLogger(__name__)

QUERY_FIELDS = (
    "input",
    "mask",
    "out_mask",
    "in_mask",
    "effect",
    "channel",
    "class_column",
    "hybrid",
    "gaussians",
    "model",
    "observation",
    "x",
    "y",
    "z",
    "split",
    "path",
    "formulation",
    "fill",
    "eps",
    "output_format",
    "precision",
)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="CSV table or JSON state file")
    common.add_argument("--eps", type=float, help="numeric tolerance (default from CHANINF_EPS)")
    common.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS)
    common.add_argument("--precision", type=int)
    common.add_argument("--fill", choices=("uniform", "error"), default="uniform",
                        help="rows for zero-mass inputs of a disintegration")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaninf",
        description="Channel-based inference on finite joint states and data tables.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    common = _common()

    marginal = sub.add_parser("marginal", parents=[common], help="marginalize onto the masked wires")
    marginal.add_argument("--mask", required=True, help="wires to keep, e.g. 1,0,0,0,1")

    extract = sub.add_parser("extract", parents=[common], help="conditional channel ω[out | in]")
    extract.add_argument("--out-mask", required=True)
    extract.add_argument("--in-mask", required=True)

    invert = sub.add_parser("invert", parents=[common], help="Bayesian inversion")
    invert.add_argument("--mask", help="input wires; with --channel, the wires of the prior")
    invert.add_argument("--channel", help="named channel from a JSON state file")

    cond = sub.add_parser("condition", parents=[common], help="condition the state on an effect")
    cond.add_argument("--effect", required=True, help='"t:1,f:0" or "{t}"')
    cond.add_argument("--mask", help="wires the effect lives on (default: all)")

    cross = sub.add_parser("crossover", parents=[common], help="posterior on the first wires from an effect on the rest")
    cross.add_argument("--effect", required=True)
    cross.add_argument("--channel", help="transform the effect along this named channel first")
    cross.add_argument("--split", type=int, default=1, help="number of leading wires forming X")
    cross.add_argument("--path", choices=("backward", "joint", "forward", "all"), default="all")

    ci = sub.add_parser("ci", parents=[common], help="conditional independence X ⟂ Y | Z")
    ci.add_argument("--x", required=True)
    ci.add_argument("--y", required=True)
    ci.add_argument("--z", default="")
    ci.add_argument("--formulation", choices=("cond-factor", "factorize3", "drop-y", "factor-pair"))

    for name, help_text in (("fit", "fit a naive Bayes model and print it"), ("classify", "classify one observation")):
        nb = sub.add_parser(name, parents=[common], help=help_text)
        nb.add_argument("--class", dest="class_column", help="class column (default: last)")
        nb.add_argument("--hybrid", action="store_true", help="Gaussian densities for numeric features")
        nb.add_argument("--gaussians", help="file of feature=...;class=...;mean=...;stddev=... lines")
        if name == "classify":
            nb.add_argument("--model", help="model file written by fit")
            nb.add_argument("--observation", required=True, help="comma-separated feature values")

    serve = sub.add_parser("serve", help="run the HTTP query service")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    setup_logging(settings.log_level)

    if args.subcommand == "serve":
        from channel_inference.api_app import run_api

        run_api(settings, host=args.host, port=args.port)
        return EXIT_OK

    values = {key: getattr(args, key) for key in QUERY_FIELDS if getattr(args, key, None) is not None}
    try:
        spec = QuerySpec(subcommand=args.subcommand, **values)
        print(run_query(spec, settings))
    except PydanticValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"])
        logger.warning("invalid %s: %s", field, error["msg"])
        print(f"error: {field}: {error['msg']}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        logger.warning("%s failed: %s", args.subcommand, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MathError as exc:
        logger.warning("%s failed: %s", args.subcommand, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    return EXIT_OK


def run_cli() -> None:
    raise SystemExit(main())
