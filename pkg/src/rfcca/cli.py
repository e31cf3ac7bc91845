"""Command-line front end: bench, kcca, spectral, and select subcommands.

Configuration is a flat ``key = value`` text file with dotted keys; every key
is also exposed as a flag (dots become dashes) and flags override the file.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, DataError, NumericalError, ParameterError
from .experiments import (
    CsvSource,
    ExperimentConfig,
    SyntheticSource,
    run_benchmark,
    run_kcca_baseline,
    run_select,
    run_spectral_check,
    write_metrics_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_columns(text: str) -> tuple:
    """Comma list of column names or 0-based indices."""
    items = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        items.append(int(piece) if piece.lstrip("+-").isdigit() else piece)
    if not items:
        raise ConfigError("empty column list")
    return tuple(items)


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise ConfigError("empty integer list")
    return values


def _parse_str_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated floats, got {text!r}") from exc


def _identity(text: str) -> str:
    return text


# key -> parser; drives both the config file and the generated flags.
CONFIG_KEYS = {
    "source.kind": _identity,  # synthetic | csv
    "source.csv.path": _identity,
    "source.csv.x_columns": _parse_columns,
    "source.csv.y_columns": _parse_columns,
    "source.csv.has_header": _parse_bool,
    "source.csv.delimiter": _identity,
    "source.synthetic.n": int,
    "source.synthetic.latent_dim": int,
    "source.synthetic.d_x": int,
    "source.synthetic.d_y": int,
    "source.synthetic.noise": float,
    "source.synthetic.seed": int,
    "algorithms": _parse_str_list,
    "m_grid": _parse_int_list,
    "pool_factor": int,
    "mu": float,
    "lambda_ls": float,
    "sigma.mode": _identity,  # heuristic | fixed
    "sigma.k": int,
    "sigma.value": float,
    "sigma_y.mode": _identity,  # same | fixed
    "sigma_y.value": float,
    "repetitions": int,
    "master_seed": int,
    "split": float,
    "transform_y": _parse_bool,
    "kcca_max_n": int,
    "metrics": _parse_str_list,
}


def load_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks are skipped."""
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        mapping[key] = value
    return mapping


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from raw key/value pairs (strings allowed)."""
    parsed = {}
    for key, value in mapping.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        parsed[key] = CONFIG_KEYS[key](value) if isinstance(value, str) else value

    kind = parsed.get("source.kind", "synthetic")
    if kind == "synthetic":
        source = SyntheticSource(
            n=parsed.get("source.synthetic.n", 400),
            latent_dim=parsed.get("source.synthetic.latent_dim", 3),
            d_x=parsed.get("source.synthetic.d_x", 8),
            d_y=parsed.get("source.synthetic.d_y", 4),
            noise=parsed.get("source.synthetic.noise", 0.3),
            seed=parsed.get("source.synthetic.seed", 0),
        )
    elif kind == "csv":
        if "source.csv.path" not in parsed:
            raise ConfigError("csv source requires source.csv.path")
        if "source.csv.x_columns" not in parsed or "source.csv.y_columns" not in parsed:
            raise ConfigError("csv source requires x and y column specs")
        source = CsvSource(
            path=parsed["source.csv.path"],
            x_columns=parsed["source.csv.x_columns"],
            y_columns=parsed["source.csv.y_columns"],
            has_header=parsed.get("source.csv.has_header", True),
            delimiter=parsed.get("source.csv.delimiter", ","),
        )
    else:
        raise ConfigError(f"source.kind must be synthetic|csv, got {kind!r}")

    defaults = ExperimentConfig()
    config = ExperimentConfig(
        source=source,
        algorithms=tuple(parsed.get("algorithms", defaults.algorithms)),
        M_grid=tuple(parsed.get("m_grid", defaults.M_grid)),
        pool_factor=parsed.get("pool_factor", defaults.pool_factor),
        mu=parsed.get("mu", defaults.mu),
        lambda_ls=parsed.get("lambda_ls", defaults.lambda_ls),
        sigma_mode=parsed.get("sigma.mode", defaults.sigma_mode),
        sigma_k=parsed.get("sigma.k", defaults.sigma_k),
        sigma_value=parsed.get("sigma.value", defaults.sigma_value),
        sigma_y_mode=parsed.get("sigma_y.mode", defaults.sigma_y_mode),
        sigma_y_value=parsed.get("sigma_y.value", defaults.sigma_y_value),
        repetitions=parsed.get("repetitions", defaults.repetitions),
        master_seed=parsed.get("master_seed", defaults.master_seed),
        split=parsed.get("split", defaults.split),
        transform_y=parsed.get("transform_y", defaults.transform_y),
        kcca_max_n=parsed.get("kcca_max_n", defaults.kcca_max_n),
        metrics=tuple(parsed.get("metrics", defaults.metrics)),
    )
    config.validate()
    return config


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--seed", type=int, help="alias for --master-seed")
    parser.add_argument(
        "--no-timing", action="store_true", help="blank the timing columns"
    )
    parser.add_argument("--quiet", action="store_true", help="suppress the summary")
    for key in CONFIG_KEYS:
        parser.add_argument(
            "--" + key.replace(".", "-").replace("_", "-"),
            dest=f"cfg::{key}",
            metavar="V",
            help=argparse.SUPPRESS,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfcca",
        description="Random-feature CCA benchmarks, baselines, and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run the feature-selection benchmark grid")
    _add_common_flags(bench)

    kcca_p = sub.add_parser("kcca", help="exact-kernel KCCA baseline row")
    _add_common_flags(kcca_p)

    spectral = sub.add_parser("spectral", help="empirical spectral-approximation rates")
    _add_common_flags(spectral)
    spectral.add_argument("--spectral-m", type=int, required=True, help="features per trial")
    spectral.add_argument("--spectral-lambda", type=float, required=True)
    spectral.add_argument("--deltas", default="0.5", help="comma list of deltas")
    spectral.add_argument("--trials", type=int, default=50)
    spectral.add_argument(
        "--weighting", choices=("plain", "ls", "exact"), default="ls"
    )
    spectral.add_argument("--rho", type=float, default=0.1)

    select = sub.add_parser("select", help="dump one rule's scores and selection")
    _add_common_flags(select)
    select.add_argument(
        "--rule", choices=("ls", "eerf", "orcca1", "orcca2"), required=True
    )
    select.add_argument("--select-m", type=int, required=True)

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    mapping: dict[str, str] = {}
    if args.config:
        mapping.update(load_config_file(args.config))
    for key in CONFIG_KEYS:
        override = getattr(args, f"cfg::{key}", None)
        if override is not None:
            mapping[key] = override
    if args.seed is not None:
        mapping["master_seed"] = str(args.seed)
    return config_from_mapping(mapping)


def _open_out(args: argparse.Namespace):
    if args.out:
        return open(args.out, "w")
    return None


def _summarize(rows, config, stream) -> None:
    by_alg: dict[tuple[str, int], list] = {}
    for row in rows:
        by_alg.setdefault((row.algorithm, row.M), []).append(row)
    metric_attr = {"total": "total_cc", "top10": "top10_cc", "largest": "largest_cc"}
    for (algorithm, M), group in sorted(by_alg.items()):
        parts = []
        for metric in config.metrics:
            values = [getattr(r, metric_attr[metric]) for r in group]
            parts.append(f"{metric}={sum(values) / len(values):.4f}")
        stream.write(f"# {algorithm} M={M} reps={len(group)} " + " ".join(parts) + "\n")


def _cmd_bench(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    rows = run_benchmark(config)
    out = _open_out(args)
    try:
        write_metrics_csv(rows, out or sys.stdout, no_timing=args.no_timing)
    finally:
        if out:
            out.close()
    if not args.quiet:
        _summarize(rows, config, sys.stderr)
    return EXIT_OK


def _cmd_kcca(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    row = run_kcca_baseline(config)
    out = _open_out(args)
    try:
        write_metrics_csv([row], out or sys.stdout, no_timing=args.no_timing)
    finally:
        if out:
            out.close()
    return EXIT_OK


def _cmd_spectral(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_spectral_check(
        config,
        M=args.spectral_m,
        lam=args.spectral_lambda,
        deltas=_parse_float_list(args.deltas),
        trials=args.trials,
        weighting=args.weighting,
        rho=args.rho,
    )
    out = _open_out(args)
    stream = out or sys.stdout
    try:
        for line in result.as_records():
            stream.write(line + "\n")
    finally:
        if out:
            out.close()
    return EXIT_OK


def _cmd_select(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    outcome = run_select(config, args.rule, args.select_m)
    out = _open_out(args)
    stream = out or sys.stdout
    try:
        stream.write("view,pool_index,score,selected,weight_ratio\n")
        for view in sorted(outcome):
            scores, selection = outcome[view]
            chosen = {int(i): k for k, i in enumerate(selection.indices)}
            for index, score in enumerate(scores.scores):
                ratio = ""
                if selection.weight_ratios is not None and index in chosen:
                    ratio = repr(float(selection.weight_ratios[chosen[index]]))
                stream.write(
                    f"{view},{index},{float(score)!r},"
                    f"{str(index in chosen).lower()},{ratio}\n"
                )
    finally:
        if out:
            out.close()
    return EXIT_OK


_COMMANDS = {
    "bench": _cmd_bench,
    "kcca": _cmd_kcca,
    "spectral": _cmd_spectral,
    "select": _cmd_select,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
