"""Command-line front end.

    fifaug generate --kind diurnal --n 168 --seed 0 --out diurnal.csv
    fifaug interpolate diurnal.csv --strategy cvs --out diurnal-cvs.csv
    fifaug densify diurnal.csv --factor 6 --strategy all
    fifaug forecast diurnal.csv --strategy cvs --tune --tuning-trials 10 --studies studies.json
    fifaug analyze diurnal.csv
    fifaug plot diurnal.csv diurnal-cvs.csv --out diurnal.svg

Exit codes: 0 success, 1 I/O error, 2 usage error, 3 numerical or domain error. Failures
also print one JSON line {"error", "exit_code", "message"} to stderr. Log verbosity comes
from the FIFAUG_LOG_LEVEL environment variable (default WARNING).
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__, perflog
from .analysis import adf_test, hurst_exponent
from .cancellation import Cancel
from .datasets import DATASET_KINDS, file_digest, generate, read_csv, write_csv
from .errors import DatasetError, FifaugError
from .fif import DEFAULT_N_INTERPOLATION, evaluate_linear
from .predictor import PredictorConfig
from .storage import LocalStorage
from .strategies import StrategyConfig, StrategyKind, augment, densify_against, resolve_sequence_size, simulate_densify
from .svgplot import Curve, write_svg
from .tuning import TUNING_STUDY, run_forecast

logger = logging.getLogger(__name__)
PERF_LOGGER = logging.getLogger("fifaug.perflog")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
STRATEGY_CHOICES = [k.value for k in StrategyKind]


def write_json(path, document):
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(dumps(document))
            f.write("\n")
    except OSError as e:
        raise DatasetError(f"Cannot write {path}: {e.strerror or e}") from e


def dumps(document):
    return json.dumps(document, sort_keys=True, indent=2)


def _strategy_config(args, kind):
    low, high = args.s_range
    return StrategyConfig(
        kind=kind,
        n_interpolation=args.n_interpolation,
        sequence_size=args.sequence_size,
        s_range=(low, high),
        iterations=args.iterations,
        trials=args.trials,
        sequence_trials=args.sequence_trials,
        seed=args.seed,
        strict=args.strict,
    )


def max_deviation(original, augmented):
    """Largest distance between the augmented values and the linear interpolant of the original."""
    return float(np.max(np.abs(augmented.y - evaluate_linear(original, augmented.x))))


def cmd_generate(args):
    series = generate(args.kind, args.n, args.seed)
    write_csv(args.out, series)
    print(f"Wrote {len(series)} points to {args.out}")


def cmd_interpolate(args):
    dataset = read_csv(args.input)
    config = _strategy_config(args, args.strategy)
    config.sequence_size = resolve_sequence_size(dataset.series, config)
    augmented = augment(dataset.series, config, workers=args.workers)
    write_csv(args.out, augmented, with_x=True)

    manifest_path = args.out + ".manifest.json"
    write_json(manifest_path, {
        "command": "interpolate",
        "version": __version__,
        "config": config.to_dict(),
        "seed": args.seed,
        "input": args.input,
        "input_hash": file_digest(args.input),
        "outputs": [args.out, manifest_path],
        "metrics": {
            "input_points": len(dataset.series),
            "output_points": len(augmented),
            "sequence_size": config.sequence_size,
            "max_deviation_from_linear": max_deviation(dataset.series, augmented),
        },
    })
    print(f"Wrote {len(augmented)} points to {args.out}")


def cmd_densify(args):
    dataset = read_csv(args.input)
    kinds = STRATEGY_CHOICES if args.strategy == "all" else [args.strategy]
    truth = read_csv(args.ground_truth).series if args.ground_truth else None

    results = []
    for kind in kinds:
        config = _strategy_config(args, kind)
        if truth is None:
            result = simulate_densify(dataset.series, args.factor, config, workers=args.workers)
        else:
            result = densify_against(dataset.series, truth, args.factor, config, workers=args.workers)
        results.append(result.to_dict())
        print(f"{kind:<8} MAE {result.mae:.4f}")

    if args.report:
        write_json(args.report, {
            "command": "densify",
            "version": __version__,
            "seed": args.seed,
            "factor": args.factor,
            "input": args.input,
            "input_hash": file_digest(args.input),
            "ground_truth": args.ground_truth,
            "results": results,
        })


def _format_row(name, train, test):
    return f"{name:<12} {train.rmse:>10.4f} {test.rmse:>10.4f} {test.mae:>10.4f}"


def cmd_forecast(args):
    dataset = read_csv(args.input)
    strategy = None if args.strategy == "none" else _strategy_config(args, args.strategy)

    config = None
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as f:
                config = PredictorConfig.from_dict(json.load(f))
        except OSError as e:
            raise DatasetError(f"Cannot read config {args.config}: {e.strerror or e}") from e
        except json.decoder.JSONDecodeError as e:
            raise DatasetError(f"Malformed config {args.config}: {e}") from e

    storage = None
    if args.studies:
        if not args.tune:
            raise ValueError("--studies only applies together with --tune")
        storage = LocalStorage(args.studies)
        if args.restart and storage.delete_study(TUNING_STUDY) is not None:
            logger.info("Discarded the stored %r study in %s", TUNING_STUDY, args.studies)
        logger.info("Studies in %s: %s", args.studies, ", ".join(storage.study_names()) or "none")

    cancel = Cancel.after_timeout(args.timeout) if args.timeout else None
    report = run_forecast(
        dataset.series,
        strategy=strategy,
        config=config,
        tune=args.tune,
        trials=args.tuning_trials,
        repeats=args.repeats,
        seed=args.seed,
        epochs=args.epochs,
        batch_size=args.batch_size,
        workers=args.workers,
        cancel=cancel,
        storage=storage,
        denormalize_output=args.denormalize,
    )

    used = report.config
    print(f"strategy={report.strategy or 'none'} points={report.n_points} transform={report.transform.method.value}")
    print(f"units={used.units} window={used.input_data_points} learning_rate={used.learning_rate:.6g} "
          f"epochs={used.epochs} batch_size={used.batch_size}")
    print(f"{'model':<12} {'train RMSE':>10} {'test RMSE':>10} {'test MAE':>10}")
    print(_format_row("lstm", report.train, report.test))
    print(_format_row("ar-baseline", report.baseline_train, report.baseline_test))

    if args.report:
        document = report.to_dict()
        document.update({"command": "forecast", "version": __version__, "seed": args.seed,
                         "input": args.input, "input_hash": file_digest(args.input)})
        write_json(args.report, document)
    if args.save_config:
        write_json(args.save_config, used.to_dict())


def cmd_analyze(args):
    dataset = read_csv(args.input)
    values = dataset.series.y
    both = not (args.hurst or args.adf)
    document = {"input": args.input, "points": len(values)}
    if args.hurst or both:
        estimate = hurst_exponent(values, relaxed=len(values) < 20)
        document["hurst"] = {"h": estimate.h, "window_sizes": estimate.window_sizes,
                             "regression_r2": estimate.regression_r2}
    if args.adf or both:
        document["adf"] = adf_test(values).to_dict()
    print(dumps(document))


def cmd_plot(args):
    datasets = [read_csv(path) for path in args.inputs]
    curves = [Curve(os.path.basename(path), d.series) for path, d in zip(args.inputs, datasets)]
    if args.markers:
        markers = Curve(os.path.basename(args.markers), read_csv(args.markers).series)
    else:
        markers = curves[0]
    try:
        write_svg(args.out, curves, markers, title=args.title)
    except OSError as e:
        raise DatasetError(f"Cannot write {args.out}: {e.strerror or e}") from e
    print(f"Wrote {args.out}")


def _add_strategy_options(parser, choices, default):
    parser.add_argument("--strategy", choices=choices, default=default)
    parser.add_argument("--n-interpolation", type=int, default=DEFAULT_N_INTERPOLATION)
    parser.add_argument("--sequence-size", type=int, default=None,
                        help="segment length; default 10, or optimized for fs")
    parser.add_argument("--strict", action="store_true", help="require equal-length segments")
    parser.add_argument("--s-range", type=float, nargs=2, default=(-1.0, 1.0), metavar=("LOW", "HIGH"),
                        help="chs scaling range")
    parser.add_argument("--iterations", type=int, default=15, help="chs candidates per segment")
    parser.add_argument("--trials", type=int, default=15, help="cvs trials per segment")
    parser.add_argument("--sequence-trials", type=int, default=50, help="fs sequence-size trials")
    parser.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="fifaug", description="Fractal interpolation for time-series augmentation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("--kind", choices=DATASET_KINDS, required=True)
    p.add_argument("--n", type=int, default=168)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = commands.add_parser("interpolate", help="augment a dataset with fractal interpolation")
    p.add_argument("input")
    _add_strategy_options(p, STRATEGY_CHOICES, "cvs")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_interpolate)

    p = commands.add_parser("densify", help="downsample, re-interpolate and report the MAE")
    p.add_argument("input")
    _add_strategy_options(p, STRATEGY_CHOICES + ["all"], "all")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--factor", type=int, default=6)
    p.add_argument("--ground-truth", help="fine-grained series; INPUT is then its downsampled version")
    p.add_argument("--report", help="write the results as JSON")
    p.set_defaults(func=cmd_densify)

    p = commands.add_parser("forecast", help="train and evaluate the recurrent predictor")
    p.add_argument("input")
    _add_strategy_options(p, ["none"] + STRATEGY_CHOICES, "none")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--tune", action="store_true", help="search the hyperparameters first")
    mode.add_argument("--config", help="PredictorConfig JSON written by --save-config")
    p.add_argument("--tuning-trials", type=int, default=50)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--epochs", type=int, default=None, help="default 150 raw, 25 interpolated")
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--timeout", type=float, default=None, help="stop tuning after this many seconds")
    p.add_argument("--studies", help="JSON file keeping the tuning study; an existing one is resumed")
    p.add_argument("--restart", action="store_true", help="discard the stored tuning study first")
    p.add_argument("--denormalize", action="store_true", help="include original-scale test predictions")
    p.add_argument("--report", help="write the report as JSON")
    p.add_argument("--save-config", help="write the PredictorConfig used as JSON")
    p.set_defaults(func=cmd_forecast)

    p = commands.add_parser("analyze", help="Hurst exponent and ADF test")
    p.add_argument("input")
    p.add_argument("--hurst", action="store_true")
    p.add_argument("--adf", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = commands.add_parser("plot", help="SVG chart of one or more datasets")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--markers", help="dataset drawn as point markers; default the first input")
    p.add_argument("--title")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def configure_logging():
    """Set up the root logger; returns a tally of the hot paths when DEBUG is on, else None."""
    level = os.environ.get("FIFAUG_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if PERF_LOGGER.isEnabledFor(logging.DEBUG):
        return perflog.PerfTally().install()
    return None


def report_error(e, exit_code):
    sys.stderr.write(json.dumps({"error": type(e).__name__, "exit_code": exit_code, "message": str(e)}) + "\n")
    return exit_code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    tally = configure_logging()

    try:
        args.func(args)
    except FifaugError as e:
        return report_error(e, e.exit_code)
    except OSError as e:
        return report_error(e, EXIT_IO)
    except ValueError as e:
        return report_error(e, EXIT_USAGE)
    finally:
        if tally is not None:
            tally.uninstall()
            tally.log_summary(PERF_LOGGER)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
