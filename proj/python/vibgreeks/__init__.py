"""Vibrato + AD Monte Carlo greeks."""

from pathlib import Path

from ._greeks import (
    CSV_HEADER,
    ConfigError,
    NumericalError,
    bench_hessian,
    bs_greek,
    list_methods,
    run,
    run_csv,
)


def run_file(path, **kwargs):
    """Run the experiment in a config file; see run() for keyword arguments."""
    return run(Path(path).read_text(), **kwargs)


__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "NumericalError",
    "bench_hessian",
    "bs_greek",
    "list_methods",
    "run",
    "run_csv",
    "run_file",
]
