"""
Command line front end.

    python -m szego_borel phi --m 2 --grid 0:6:13 --compare-asymptotic
    python -m szego_borel zeros --m 2 --count 30
    python -m szego_borel kernel --m 2 --route nagel,borel --ratio
    python -m szego_borel probe gevrey --m 2 --kmax 20

Tables go to stdout (or --out) as CSV with a trailing metadata comment, or
as JSON.  Exit codes: 0 success, 1 other failures, 2 usage, 3 domain
refusal, 4 numerical non-convergence.
"""
import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from . import __version__
from .backends.filesystem import atomic_write
from .borel import K_borel
from .cache import configure_rule_cache
from .config import OUTPUT_FORMATS, RunConfig, load_config
from .contours import first_zero
from .errors import ConvergenceError, DomainError, LabError
from .nagel import BERGMAN, KERNELS, SZEGO, K_nagel, KB_nagel
from .phi import METHODS, SERIES, ModelOrder, asymptotic_agreement, phi
from .probes import (
    DEFAULT_SAMPLE,
    borel_bound_probe,
    divergence_probe,
    gevrey_probe,
    ratio_spread,
)
from .profile import haslinger_ratio, profile_sweep
from .serializers.json import SCHEMA_VERSION, JSONSerializer
from .singular import EvalPoint, boundedness_probe, g_xi
from .zeros import ZeroTable, zero_law_fit

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4

ROUTES = ("nagel", "borel")
PROBES = ("divergence", "gevrey", "borel-bound", "boundedness", "profile", "haslinger")

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class Table:
    header: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)
    # 1-based columns for --emit-plot
    plot: Tuple[int, int] = (1, 2)


def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render(table: Table, config: RunConfig) -> str:
    meta = {"m": config.m, "rel_tol": config.rel_tol, "abs_tol": config.abs_tol}
    meta.update(table.meta)
    meta["schema_version"] = SCHEMA_VERSION
    if config.output == "json":
        doc = {
            "columns": table.header,
            "rows": [[_fmt(v) for v in row] for row in table.rows],
            "meta": {k: _fmt(v) for k, v in meta.items()},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    buf.write("# " + " ".join(f"{k}={_fmt(v)}" for k, v in meta.items()) + "\n")
    return buf.getvalue()


def plot_script(table: Table, data_path: str) -> str:
    x, y = table.plot
    return (
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        "set key autotitle columnhead\n"
        f"set xlabel '{table.header[x - 1]}'\n"
        f"set ylabel '{table.header[y - 1]}'\n"
        f"plot '{os.path.basename(data_path)}' using {x}:{y} with linespoints\n"
    )


def _map(jobs: int, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """func over items on up to ``jobs`` threads, results in input order."""
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# Argument types -----------------------------------------------------------------

def complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def grid_arg(text: str) -> np.ndarray:
    """start:stop:count"""
    try:
        start, stop, count = text.split(":")
        count = int(count)
        if count < 1:
            raise ValueError
        return np.linspace(float(start), float(stop), count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:count, got {text!r}")


def point_arg(text: str) -> EvalPoint:
    """x,y,t (t optional)"""
    try:
        parts = [float(p) for p in text.split(",")]
        if len(parts) not in (2, 3):
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"point must be x,y[,t], got {text!r}")
    return EvalPoint(*parts)


def routes_arg(text: str) -> Tuple[str, ...]:
    routes = tuple(r.strip() for r in text.split(",") if r.strip())
    bad = [r for r in routes if r not in ROUTES]
    if bad or not routes:
        raise argparse.ArgumentTypeError(f"routes must be taken from {ROUTES}, got {text!r}")
    return routes


# Commands ---------------------------------------------------------------------

def _load_table(config: RunConfig, count: Optional[int] = None) -> ZeroTable:
    if config.zero_table_path:
        with open(config.zero_table_path, "rb") as fh:
            table = JSONSerializer().deserialize(fh.read())
        if table.order.m != config.m:
            raise DomainError(f"zero table {config.zero_table_path} is for m={table.order.m}, "
                              f"not m={config.m}")
        return table
    return config.table_cache().get_or_build(config.m, count or config.zero_count,
                                             config.quad_spec)


def cmd_phi(args: argparse.Namespace, config: RunConfig) -> Table:
    order = ModelOrder(config.m)
    xs = list(args.x or []) + [complex(v) for v in (args.grid if args.grid is not None else [])]
    if not xs:
        raise ValueError("give --x or --grid")
    header = ["x_re", "x_im", "phi_re", "phi_im", "method", "err_est"]
    if args.compare_asymptotic:
        header.append("deviation")

    def row(x: complex) -> List[Any]:
        value = phi(order, x, args.method, config.quad_spec)
        out = [x.real, x.imag, value.value.real, value.value.imag, value.method, value.err_est]
        if args.compare_asymptotic:
            out.append(asymptotic_agreement(order, [x])[0] if x != 0 else float("nan"))
        return out

    return Table(header, _map(config.jobs, row, xs), plot=(1, 3))


def cmd_zeros(args: argparse.Namespace, config: RunConfig) -> Dict[str, Any]:
    if config.m == 1:
        raise DomainError("φ has no zeros for m=1")
    count = args.count or config.zero_count
    cache = config.table_cache()
    table = cache.get_or_build(config.m, count, config.quad_spec)
    data = JSONSerializer().serialize(table)
    path = args.out or config.zero_table_path or cache.store.path_for(
        cache.key_for(config.m, count, config.quad_spec))
    if args.out or config.zero_table_path:
        atomic_write(path, data)
    summary: Dict[str, Any] = {"m": config.m, "count": len(table), "path": path,
                               "schema_version": SCHEMA_VERSION}
    if len(table) >= 15:
        fit = zero_law_fit(table)
        summary.update(c2_hat=fit.c2_hat, j0_raw=fit.j0_raw, j0_hat=fit.j0_hat,
                       max_residual=fit.max_residual, anomaly=fit.anomaly)
    return summary


def _kernel_row(order: ModelOrder, table: Optional[ZeroTable], pt: EvalPoint, route: str,
                which: str, config: RunConfig) -> List[Any]:
    try:
        if route == "nagel":
            nagel = KB_nagel if which == BERGMAN else K_nagel
            value = nagel(order, pt, config.quad_spec)
        else:
            value = K_borel(order, table, pt, which, config.quad_spec)
    except DomainError as e:
        return [pt.x, pt.y, pt.t, route, float("nan"), float("nan"), float("nan"), f"domain: {e}"]
    except ConvergenceError as e:
        return [pt.x, pt.y, pt.t, route, float("nan"), float("nan"), float("nan"),
                f"convergence: {e}"]
    return [pt.x, pt.y, pt.t, value.route, value.value.real, value.value.imag, value.err_est, ""]


def cmd_kernel(args: argparse.Namespace, config: RunConfig) -> Table:
    order = ModelOrder(config.m)
    points = args.point or list(DEFAULT_SAMPLE)
    routes = ("nagel", "borel") if args.ratio else args.route
    table = _load_table(config) if "borel" in routes else None
    jobs = [(pt, route) for pt in points for route in routes]
    rows = _map(config.jobs, lambda job: _kernel_row(order, table, job[0], job[1], args.which,
                                                     config), jobs)
    errors = [r[-1] for r in rows if r[-1]]
    if errors and len(errors) == len(rows):
        kind = DomainError if all(e.startswith("domain") for e in errors) else ConvergenceError
        raise kind("; ".join(sorted(set(errors))))
    if not args.ratio:
        header = ["x", "y", "t", "route", "value_re", "value_im", "err_est", "error"]
        return Table(header, rows, {"which": args.which}, plot=(2, 5))
    ratios = []
    out = []
    for i, pt in enumerate(points):
        nagel, borel = rows[2 * i], rows[2 * i + 1]
        if nagel[-1] or borel[-1]:
            out.append([pt.x, pt.y, pt.t, float("nan"), float("nan"), nagel[-1] or borel[-1]])
            continue
        r = complex(nagel[4], nagel[5]) / complex(borel[4], borel[5])
        ratios.append(r)
        out.append([pt.x, pt.y, pt.t, r.real, r.imag, ""])
    meta = {"which": args.which, "spread": ratio_spread(ratios) if ratios else float("nan")}
    return Table(["x", "y", "t", "ratio_re", "ratio_im", "error"], out, meta, plot=(2, 4))


def _probe_divergence(args, config, order) -> Table:
    table = _load_table(config)
    report = divergence_probe(order, table, args.point or EvalPoint(0.0, 1.0))
    rows = [[j, a, b] for j, (a, b) in enumerate(
        zip(report.log_magnitudes, report.damped_log_magnitudes), start=1)]
    meta = {"increasing_from": report.increasing_from, "growth_rate": report.growth_rate,
            "damped_decreasing_from": report.damped_decreasing_from}
    return Table(["j", "log_term", "log_damped"], rows, meta)


def _probe_gevrey(args, config, order) -> Table:
    table = _load_table(config)
    report = gevrey_probe(order, table, args.point or EvalPoint(0.0, 1.0), args.kmax, args.kmin,
                          spec=config.quad_spec)
    rows = [[k, logd, r.real, r.imag, rem] for k, logd, r, rem in
            zip(report.ks, report.log_derivatives, report.ratios, report.remainder)]
    meta = {"s_hat": report.estimate.s_hat, "monotone": report.estimate.monotone}
    return Table(["k", "log_derivative", "ratio_re", "ratio_im", "remainder"], rows, meta)


def _probe_borel_bound(args, config, order) -> Table:
    grid = np.geomspace(1.0, args.pmax, args.samples)
    report = borel_bound_probe(order, args.point or EvalPoint(0.0, 1.0), grid,
                               spec=config.quad_spec)
    rows = [[s.p, s.H.real, s.H.imag, v] for s, v in zip(report.samples, report.scaled)]
    meta = {"sup": report.sup, "tail_slope": report.tail_slope}
    return Table(["p", "H_re", "H_im", "scaled"], rows, meta, plot=(1, 4))


def _probe_boundedness(args, config, order) -> Table:
    xi = 1j * (first_zero(order.m) + args.shift)
    report = boundedness_probe(order, xi, spec=config.quad_spec)
    grid = np.linspace(-6.0, 6.0, args.samples)
    values = _map(config.jobs, lambda u: g_xi(order, xi, u, config.quad_spec), list(grid))
    rows = [[u, g.log_magnitude, g.branch] for u, g in zip(grid, values)]
    meta = {"bounded": report.bounded, "sup_window": report.sup_window}
    return Table(["u", "log_abs_g", "branch"], rows, meta)


def _probe_profile(args, config, order) -> Table:
    omegas = np.linspace(0.0, 0.99, args.samples)
    samples = profile_sweep(order, omegas)
    rows = [[s.omega, s.Phi, s.PhiB, s.normalized, s.normalizedB] for s in samples]
    norm = [s.normalized for s in samples]
    return Table(["omega", "Phi", "PhiB", "normalized", "normalizedB"], rows,
                 {"band": max(norm) / min(norm)}, plot=(1, 4))


def _probe_haslinger(args, config, order) -> Table:
    us = np.linspace(0.0, args.umax, args.samples)
    ratios = _map(config.jobs, lambda u: haslinger_ratio(order, float(u)), list(us))
    return Table(["u", "ratio"], [[u, r] for u, r in zip(us, ratios)],
                 {"band": max(ratios) / min(ratios)})


_PROBES: Dict[str, Callable[..., Table]] = {
    "divergence": _probe_divergence,
    "gevrey": _probe_gevrey,
    "borel-bound": _probe_borel_bound,
    "boundedness": _probe_boundedness,
    "profile": _probe_profile,
    "haslinger": _probe_haslinger,
}


def cmd_probe(args: argparse.Namespace, config: RunConfig) -> Table:
    return _PROBES[args.kind](args, config, ModelOrder(config.m))


# Parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, help="model order (default 2)")
    common.add_argument("--rel-tol", type=float)
    common.add_argument("--abs-tol", type=float)
    common.add_argument("--config", help="JSON file of run settings")
    common.add_argument("--table", dest="zero_table_path", help="zero table file")
    common.add_argument("--table-dir", help="zero table directory (env SZEGO_BOREL_TABLE_DIR)")
    common.add_argument("--output", choices=OUTPUT_FORMATS)
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--jobs", type=int, help="worker threads for row fan-out")
    common.add_argument("--rule-cache-size", type=int,
                        help="most node rules and Borel lines kept in memory")
    common.add_argument("--emit-plot", action="store_true",
                        help="write a gnuplot script next to --out")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="szego_borel",
        description="Numerical laboratory for the Szegő and Bergman kernels of "
                    "Im z2 = (Re z1)^{2m}.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi", parents=[common], help="evaluate phi")
    p.add_argument("--x", type=complex_arg, action="append")
    p.add_argument("--grid", type=grid_arg, help="real grid start:stop:count")
    p.add_argument("--method", choices=METHODS, default=SERIES)
    p.add_argument("--compare-asymptotic", action="store_true")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("zeros", parents=[common], help="locate and store the zeros of phi")
    p.add_argument("--count", type=int)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("kernel", parents=[common], help="evaluate the kernels")
    p.add_argument("--point", type=point_arg, action="append", help="x,y[,t]; repeatable")
    p.add_argument("--route", type=routes_arg, default=ROUTES)
    p.add_argument("--which", choices=KERNELS, default=SZEGO)
    p.add_argument("--ratio", action="store_true", help="K_nagel / K_borel per point")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("probe", parents=[common], help="run a numerical experiment")
    p.add_argument("kind", choices=PROBES)
    p.add_argument("--point", type=point_arg)
    p.add_argument("--kmin", type=int, default=0)
    p.add_argument("--kmax", type=int, default=20)
    p.add_argument("--pmax", type=float, default=1e4)
    p.add_argument("--umax", type=float, default=3.0)
    p.add_argument("--shift", type=float, default=0.0, help="xi = i (a_1 + shift)")
    p.add_argument("--samples", type=int, default=31)
    p.set_defaults(func=cmd_probe)
    return parser


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    atomic_write(out, text.encode("utf-8"))


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    _setup_logging(args.verbose)
    overrides = {
        "m": args.m,
        "rel_tol": args.rel_tol,
        "abs_tol": args.abs_tol,
        "zero_table_path": args.zero_table_path,
        "table_dir": args.table_dir,
        "output": args.output,
        "jobs": args.jobs,
        "rule_cache_size": args.rule_cache_size,
    }
    try:
        config = load_config(args.config, overrides=overrides)
    except (ValueError, OSError) as e:
        print(f"szego_borel: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_rule_cache(config.rule_cache_size)
    if args.emit_plot and not args.out:
        print("szego_borel: error: --emit-plot needs --out", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = args.func(args, config)
    except DomainError as e:
        print(f"szego_borel: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as e:
        print(f"szego_borel: did not converge: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except LabError as e:
        print(f"szego_borel: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as e:
        print(f"szego_borel: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, Table):
        _emit(render(result, config), args.out)
        if args.emit_plot:
            atomic_write(args.out + ".gp", plot_script(result, args.out).encode("utf-8"))
    else:
        print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
