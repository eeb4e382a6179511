"""``repeaterc``: command-line access to states, bounds, eta scans and figure datasets.

Exit codes: 0 on success, 2 for bad arguments, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from . import entmeasures as em
from . import repeater as rp
from .channels import (
    BellInput,
    ChannelKind,
    DensityMatrix,
    bell_mixture_lambda,
    propagate_bell,
    watched_conditional,
)
from .smallmat import eigvalsh, to_pairs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_PRECISION = 9

DEFAULT_BELL = {
    ChannelKind.PHASE_DAMPING: BellInput.PHI_PLUS,
    ChannelKind.DEPOLARIZING: BellInput.PHI_PLUS,
}


class Formatter:
    def __init__(self, precision: int = DEFAULT_PRECISION):
        self.precision = precision

    def text(self, x) -> str:
        if x is None:
            return ""
        if isinstance(x, str):
            return x
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, int):
            return str(x)
        x = float(x)
        if x == 0.0:
            return "0"
        return format(x, f".{self.precision}g")

    def number(self, x):
        if x is None or isinstance(x, (bool, int, str)):
            return x
        return float(self.text(x))


def csv_text(header: Sequence[str], rows: Iterable[Sequence], fmt: Formatter) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt.text(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def records(header: Sequence[str], rows: Iterable[Sequence], fmt: Formatter) -> list[dict]:
    return [dict(zip(header, (fmt.number(v) for v in row))) for row in rows]


def emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def table_text(header, rows, args) -> str:
    fmt = Formatter(args.precision)
    rows = list(rows)
    if args.format == "json":
        return json_text(records(header, rows, fmt))
    return csv_text(header, rows, fmt)


# -- argument types ---------------------------------------------------------


def _gamma(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value < 0.0:
        raise argparse.ArgumentTypeError(f"gamma must be finite and >= 0, got {text}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _precision(text: str) -> int:
    value = _count(text)
    if not 6 <= value <= 17:
        raise argparse.ArgumentTypeError(f"precision must be in [6, 17], got {value}")
    return value


def _channel(text: str) -> ChannelKind:
    try:
        return ChannelKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _bell(text: str) -> BellInput:
    try:
        return BellInput.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scenario(args, gamma: Optional[float] = None) -> rp.Scenario:
    bell = args.bell or DEFAULT_BELL.get(args.channel, BellInput.PSI_PLUS)
    return rp.Scenario(args.channel, bell, args.gamma if gamma is None else gamma)


def _gamma_grid(args) -> list[float]:
    if args.gamma_max < args.gamma_min:
        raise ValueError("--gamma-max must not be below --gamma-min")
    if args.steps > 1 and args.gamma_max == args.gamma_min:
        raise ValueError("a multi-point grid needs --gamma-max > --gamma-min")
    return rp.linspace(args.gamma_min, args.gamma_max, args.steps)


# -- commands ---------------------------------------------------------------


def cmd_state(args) -> str:
    s = _scenario(args)
    g = s.gamma / args.sections
    fmt = Formatter(args.precision)
    head = {
        "channel": s.kind.value,
        "bell": s.bell.value,
        "gamma": fmt.number(s.gamma),
        "sections": args.sections,
        "gamma_per_qubit": fmt.number(g),
    }
    if s.kind.is_watched:
        outcome = watched_conditional(s.bell, g)
        body = {
            "amplitudes": [[fmt.number(re), fmt.number(im)] for re, im in to_pairs(outcome.conditional_state[None, :])],
            "survival_probability": fmt.number(outcome.survival_probability),
        }
        if args.format == "csv":
            rows = [(i, re, im) for i, (re, im) in enumerate(to_pairs(outcome.conditional_state[None, :]))]
            text = csv_text(["index", "re", "im"], rows, fmt)
            return text + f"# survival_probability={fmt.text(outcome.survival_probability)}\n"
        return json_text({**head, **body})

    rho = propagate_bell(s.kind, s.bell, g).mat
    pairs = to_pairs(rho)
    if args.format == "csv":
        rows = [(k // 4, k % 4, re, im) for k, (re, im) in enumerate(pairs)]
        return csv_text(["row", "col", "re", "im"], rows, fmt)
    body = {
        "rows": 4,
        "cols": 4,
        "entries": [[fmt.number(re), fmt.number(im)] for re, im in pairs],
        "trace": fmt.number(float(sum(rho[i, i].real for i in range(4)))),
        "eigenvalues": [fmt.number(w) for w in eigvalsh(rho)],
    }
    return json_text({**head, **body})


def bounds_report(s: rp.Scenario, sections: int) -> tuple[em.BoundsReport, dict]:
    """Bounds for the pair delivered over one of ``sections`` sections."""
    g = s.gamma / sections
    extra: dict = {}
    if s.kind.is_watched:
        outcome = watched_conditional(s.bell, g)
        rho = DensityMatrix.pure(outcome.conditional_state)
        exact = em.distill_pure(outcome.conditional_state)
        extra["survival_probability"] = outcome.survival_probability
    else:
        rho = propagate_bell(s.kind, s.bell, g)
        exact = None
        if s.kind.is_flip:
            exact = em.distill_two_bell_mixture(bell_mixture_lambda(s.kind, g))
    return em.bounds(rho, exact), extra


def cmd_bounds(args) -> str:
    s = _scenario(args)
    report, extra = bounds_report(s, args.sections)
    row = {
        "channel": s.kind.value,
        "bell": s.bell.value,
        "gamma": s.gamma,
        "sections": args.sections,
        "e_formation": report.e_formation,
        "coherent_info_1": report.coherent_info_1,
        "coherent_info_2": report.coherent_info_2,
        "lower_bound": report.lower_bound,
        "exact_distillable": report.exact_distillable,
        "entangled": report.entangled,
        **extra,
    }
    fmt = Formatter(args.precision)
    if args.format == "csv":
        return csv_text(list(row), [list(row.values())], fmt)
    return json_text({k: fmt.number(v) for k, v in row.items()})


ETA_HEADER = ["m", "eta", "lower_bound", "entangled"]


def eta_rows(scan: rp.EtaScan) -> list[tuple]:
    return [(p.m, p.eta, p.lower_bound_value, p.entangled) for p in scan.points]


def cmd_eta(args) -> str:
    return table_text(ETA_HEADER, eta_rows(rp.scan(_scenario(args), args.m_max)), args)


SCAN_HEADER = ["gamma", "m", "eta", "lower_bound", "entangled"]


def scan_rows(scans: Sequence[rp.EtaScan]) -> list[tuple]:
    return [
        (sc.scenario.gamma, p.m, p.eta, p.lower_bound_value, p.entangled)
        for sc in scans
        for p in sc.points
    ]


def cmd_scan(args) -> str:
    s = _scenario(args, gamma=args.gamma_min)
    return table_text(SCAN_HEADER, scan_rows(rp.scan_grid(s, args.m_max, _gamma_grid(args))), args)


def yield_header(sections: Sequence[int]) -> list[str]:
    return ["gamma"] + [f"m{m}" for m in sections]


def yield_rows(table: rp.YieldTable) -> list[tuple]:
    return [(g, *map(float, vals)) for g, vals in zip(table.gammas, table.values)]


def cmd_yield(args) -> str:
    s = _scenario(args, gamma=args.gamma_min)
    table = rp.scan_yield(s, args.sections, _gamma_grid(args))
    return table_text(yield_header(table.sections), yield_rows(table), args)


def cmd_optimal(args) -> str:
    m_star, eta_star = rp.optimal_sections(_scenario(args), args.m_max)
    return table_text(["m_star", "eta_star"], [(m_star, eta_star)], args)


def cmd_threshold(args) -> str:
    m_ent, m_gain = rp.threshold_sections(_scenario(args), args.m_max)
    return table_text(["m_entangled", "m_eta_gt_1"], [(m_ent, m_gain)], args)


def cmd_crossover(args) -> str:
    s = _scenario(args, gamma=0.0)
    g = rp.crossover_gamma(s, args.m_a, args.m_b, (args.gamma_min, args.gamma_max))
    fmt = Formatter(args.precision)
    if args.format == "json":
        return json_text({"gamma_star": fmt.number(g)})
    return f"gamma_star={fmt.text(g)}\n"


# -- figure presets ---------------------------------------------------------

W = ChannelKind.WATCHED_AMPLITUDE_DAMPING
AD = ChannelKind.AMPLITUDE_DAMPING
PSI = BellInput.PSI_PLUS
PHI = BellInput.PHI_PLUS

FIG_GAMMA_GRID = (0.0, 3.0, 301)
FIG5_GAMMA_GRID = (0.0, 3.0, 31)


def _yield_dataset(kind, bell, sections=(1, 2)):
    def build():
        table = rp.scan_yield(rp.Scenario(kind, bell, 0.0), sections, rp.linspace(*FIG_GAMMA_GRID))
        return yield_header(table.sections), yield_rows(table)

    return build


def _eta_dataset(kind, bell, gamma, m_max=None):
    def build():
        return ETA_HEADER, eta_rows(rp.scan(rp.Scenario(kind, bell, gamma), m_max))

    return build


def _grid_dataset(kind, bell, m_max):
    def build():
        scans = rp.scan_grid(rp.Scenario(kind, bell, 0.0), m_max, rp.linspace(*FIG5_GAMMA_GRID))
        return SCAN_HEADER, scan_rows(scans)

    return build


FIGURES: dict[str, list[tuple[str, Callable]]] = {
    "fig3": [("fig3.csv", _yield_dataset(W, PSI))],
    "fig4": [("fig4.csv", _eta_dataset(W, PSI, 1.5))],
    "fig5": [("fig5.csv", _grid_dataset(W, PSI, 20))],
    "fig6": [("fig6.csv", _yield_dataset(W, PHI))],
    "fig7": [("fig7.csv", _eta_dataset(W, PHI, 1.0))],
    "fig8": [("fig8.csv", _eta_dataset(ChannelKind.BIT_FLIP, PSI, 1.5))],
    "fig9": [("fig9.csv", _eta_dataset(AD, PHI, 1.0))],
    "fig10": [("fig10.csv", _eta_dataset(AD, PSI, 2.0))],
    "fig11": [
        ("fig11_phase_damping.csv", _eta_dataset(ChannelKind.PHASE_DAMPING, PHI, 1.0)),
        ("fig11_depolarizing.csv", _eta_dataset(ChannelKind.DEPOLARIZING, PHI, 0.545)),
    ],
}


def write_figure(name: str, out_dir: Path, precision: int = DEFAULT_PRECISION) -> list[Path]:
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}")
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = Formatter(precision)
    written = []
    for filename, build in FIGURES[name]:
        header, rows = build()
        path = out_dir / filename
        path.write_text(csv_text(header, rows, fmt), encoding="utf-8", newline="\n")
        written.append(path)
    return written


def cmd_figure(args) -> str:
    paths = write_figure(args.name, Path(args.out or "."), args.precision)
    return "".join(f"{p}\n" for p in paths)


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repeaterc",
        description="Entanglement yield and resource reduction for repeater-segmented noisy channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default: json for state/bounds, csv otherwise)")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--precision", type=_precision, default=DEFAULT_PRECISION,
                        help="significant digits, 6-17 (default: %(default)s)")

    chan = argparse.ArgumentParser(add_help=False)
    chan.add_argument("--channel", type=_channel, required=True,
                      help=", ".join(k.value for k in ChannelKind))
    chan.add_argument("--bell", type=_bell, default=None,
                      help="psi-plus or phi-plus (default: phi-plus for phase-damping and "
                           "depolarizing, psi-plus otherwise)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--gamma-min", type=_gamma, default=0.0)
    grid.add_argument("--gamma-max", type=_gamma, default=3.0)
    grid.add_argument("--steps", type=_count, default=31)

    def add(name, func, parents, help_text, out_format="csv"):
        p = sub.add_parser(name, parents=parents, help=help_text)
        p.set_defaults(func=func, default_format=out_format)
        return p

    p = add("state", cmd_state, [chan, common], "two-qubit state after one section", "json")
    p.add_argument("--gamma", type=_gamma, required=True)
    p.add_argument("--sections", type=_count, default=1)

    p = add("bounds", cmd_bounds, [chan, common], "entanglement bounds after one section", "json")
    p.add_argument("--gamma", type=_gamma, required=True)
    p.add_argument("--sections", type=_count, default=1)

    for name, func, help_text in (
        ("eta", cmd_eta, "eta for m = 1..m-max"),
        ("optimal", cmd_optimal, "section count maximizing eta"),
        ("threshold", cmd_threshold, "first entangled section count and first with eta > 1"),
    ):
        p = add(name, func, [chan, common], help_text)
        p.add_argument("--gamma", type=_gamma, required=True)
        p.add_argument("--m-max", type=_count, default=None)

    p = add("scan", cmd_scan, [chan, grid, common], "eta over a gamma grid and m = 1..m-max")
    p.add_argument("--m-max", type=_count, default=None)

    p = add("yield", cmd_yield, [chan, grid, common], "yield per source over a gamma grid")
    p.add_argument("--sections", type=_count, nargs="+", default=[1, 2])

    p = add("crossover", cmd_crossover, [chan, common], "gamma where two section counts yield equally")
    p.add_argument("--m-a", type=_count, required=True)
    p.add_argument("--m-b", type=_count, required=True)
    p.add_argument("--gamma-min", type=_gamma, default=0.0, help="bracket start")
    p.add_argument("--gamma-max", type=_gamma, default=10.0, help="bracket end")

    p = sub.add_parser("figure", help="write the dataset behind a figure preset")
    p.add_argument("name", choices=sorted(FIGURES, key=lambda n: int(n[3:])))
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--precision", type=_precision, default=DEFAULT_PRECISION)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "format", "csv") is None:
        args.format = args.default_format
    try:
        text = args.func(args)
    except ArithmeticError as exc:
        print(f"repeaterc: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"repeaterc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(text, None if args.func is cmd_figure else args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
