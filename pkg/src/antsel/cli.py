"""Command-line front end.

Usage::

    antsel simulate [--preset fig1|fig2|fig3|fig4] [--m 64] [--ks 32,50]
                    [--phi 0.6] [--tau 0.6] [--snr-db 0:2:10]
                    [--schemes omp,mrc] [--trials 10000] [--symbols 100]
                    [--seed 1] [--workers N] [--out results.csv]

List-valued flags take a comma list or an inclusive ``start:step:stop``
range. The run covers the Cartesian product of all lists; combinations with
``k_s > m`` are skipped. All points that share ``(m, phi, tau, snr_db)`` use
the same random substream, so MRC and every ``K_s`` are compared on
identical channels, noise and bits.
"""

import argparse
import csv
from dataclasses import dataclass
import itertools
import math
import sys

from antsel.exceptions import AntselError
from antsel.harness import SimPoint, default_workers, run_points

CSV_HEADER = (
    "scheme",
    "m",
    "k_s",
    "phi",
    "tau",
    "snr_db",
    "trials",
    "symbols_per_channel",
    "seed",
    "bits_sent",
    "bit_errors",
    "ber",
    "stderr",
)

SCHEME_ALIASES = {"omp": "omp-selection", "omp-selection": "omp-selection", "mrc": "mrc"}

DEFAULTS = {
    "m": "64",
    "ks": "32",
    "phi": "0",
    "tau": "0",
    "snr_db": "0:2:10",
    "schemes": "omp,mrc",
    "trials": "10000",
    "symbols": "100",
    "seed": "1",
    "out": "ber.csv",
}

# Presets are plain flag values; each one can be reproduced on the command line.
PRESETS = {
    "fig1": {"m": "64", "ks": "32,50", "phi": "0.6,0.8", "tau": "0.6,0.8", "snr_db": "0:2:10"},
    "fig2": {"m": "64", "ks": "16,32,50", "phi": "0:0.1:0.9", "tau": "0.8", "snr_db": "2"},
    "fig3": {"m": "16", "ks": "8,10", "phi": "0:0.1:0.9", "tau": "0.4,0.8", "snr_db": "2"},
    "fig4": {"m": "64,128", "ks": "4:4:128", "phi": "0.8", "tau": "0.8", "snr_db": "2,10"},
}


class UsageError(AntselError):
    exit_status = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    preset: str | None
    m: tuple
    k_s: tuple
    phi: tuple
    tau: tuple
    snr_db: tuple
    schemes: tuple
    trials: int
    symbols_per_channel: int
    seed: int
    out_path: str
    workers: int

    def points(self):
        """Resolved simulation points in output order."""
        out = []
        grid = itertools.product(self.m, self.phi, self.tau, self.snr_db)
        for stream, (m, phi, tau, snr) in enumerate(grid):
            common = dict(
                m=m,
                phi=phi,
                tau=tau,
                snr_db=snr,
                trials=self.trials,
                symbols_per_channel=self.symbols_per_channel,
                seed=self.seed,
                stream=stream,
            )
            for scheme in self.schemes:
                if scheme == "mrc":
                    out.append(SimPoint(k_s=m, scheme=scheme, **common))
                    continue
                for k in self.k_s:
                    if k <= m:
                        out.append(SimPoint(k_s=k, scheme=scheme, **common))
        return out


def parse_values(text, flag, integer=False):
    """Parse ``a,b,c`` or inclusive ``start:step:stop`` into a tuple."""
    conv = int if integer else float
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, step, stop = (float(p) for p in parts)
            if not step > 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            vals = [round(start + i * step, 12) for i in range(count)]
        else:
            vals = [float(v) for v in text.split(",")]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError
        if integer:
            if any(v != int(v) for v in vals):
                raise ValueError
            vals = [int(v) for v in vals]
    except ValueError:
        raise UsageError(f"{flag}: cannot parse {text!r}") from None
    return tuple(conv(v) for v in vals)


def _help(flag, what):
    key = flag.lstrip("-").replace("-", "_")
    per_preset = ", ".join(f"{p}: {v[key]}" for p, v in PRESETS.items() if key in v)
    text = f"{what} (default {DEFAULTS[key]}"
    if per_preset:
        text += f"; {per_preset}"
    return text.replace("%", "%%") + ")"


def _build_parser():
    parser = _Parser(
        prog="antsel",
        description="Monte Carlo BER of OMP antenna selection versus MRC.",
        epilog="Lists accept 'a,b,c' or inclusive 'start:step:stop'. "
        "Explicit flags override preset values.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser(
        "simulate",
        help="run a BER sweep and write CSV",
        description="Run a BER sweep and write one CSV row per operating point.",
        epilog="Presets: "
        + "; ".join(
            f"{name} = " + " ".join(f"--{k.replace('_', '-')} {v}" for k, v in vals.items())
            for name, vals in PRESETS.items()
        ),
    )
    sim.add_argument("--preset", choices=sorted(PRESETS), help="named experiment preset (values listed below)")
    sim.add_argument("--m", help=_help("--m", "BS antenna count(s) M"))
    sim.add_argument("--ks", help=_help("--ks", "selected antennas K_s"))
    sim.add_argument("--phi", help=_help("--phi", "correlation coefficient in [0, 1)"))
    sim.add_argument("--tau", help=_help("--tau", "estimation variance in [0, 1]"))
    sim.add_argument("--snr-db", help=_help("--snr-db", "SNR per bit in dB"))
    sim.add_argument("--schemes", help=_help("--schemes", "subset of omp,mrc"))
    sim.add_argument("--trials", help=_help("--trials", "channel realizations per point"))
    sim.add_argument("--symbols", help=_help("--symbols", "BPSK symbols per realization"))
    sim.add_argument("--seed", help=_help("--seed", "master seed"))
    sim.add_argument("--out", help=_help("--out", "output CSV path"))
    sim.add_argument(
        "--workers",
        type=int,
        help="worker processes (default: $ANTSEL_WORKERS or 1)",
    )
    return parser


def _single_int(text, flag, minimum):
    try:
        val = int(text)
    except ValueError:
        val = None
    if val is None or val < minimum:
        raise UsageError(f"{flag}: expected an integer >= {minimum}, got {text!r}")
    return val


def parse_args(argv):
    """Turn ``argv`` (without the program name) into a :class:`CliConfig`."""
    ns = _build_parser().parse_args(argv)
    vals = dict(DEFAULTS)
    if ns.preset:
        vals.update(PRESETS[ns.preset])
    for key in DEFAULTS:
        given = getattr(ns, key)
        if given is not None:
            vals[key] = given

    m = parse_values(vals["m"], "--m", integer=True)
    k_s = parse_values(vals["ks"], "--ks", integer=True)
    phi = parse_values(vals["phi"], "--phi")
    tau = parse_values(vals["tau"], "--tau")
    snr = parse_values(vals["snr_db"], "--snr-db")

    if any(v < 1 for v in m):
        raise UsageError(f"--m: antenna counts must be >= 1, got {vals['m']!r}")
    if any(v < 1 for v in k_s):
        raise UsageError(f"--ks: K_s must be >= 1, got {vals['ks']!r}")
    if any(not 0 <= v < 1 for v in phi):
        raise UsageError(f"--phi: values must lie in [0, 1), got {vals['phi']!r}")
    if any(not 0 <= v <= 1 for v in tau):
        raise UsageError(f"--tau: values must lie in [0, 1], got {vals['tau']!r}")

    schemes = []
    for name in vals["schemes"].split(","):
        name = name.strip()
        if name not in SCHEME_ALIASES:
            raise UsageError(f"--schemes: unknown scheme {name!r} (choose from omp, mrc)")
        if SCHEME_ALIASES[name] not in schemes:
            schemes.append(SCHEME_ALIASES[name])
    if "omp-selection" in schemes:
        for mm in m:
            if not any(k <= mm for k in k_s):
                raise UsageError(f"--ks: no K_s value fits M={mm}")

    workers = ns.workers if ns.workers is not None else default_workers()
    if workers < 1:
        raise UsageError("--workers: must be >= 1")

    cfg = CliConfig(
        preset=ns.preset,
        m=m,
        k_s=k_s,
        phi=phi,
        tau=tau,
        snr_db=snr,
        schemes=tuple(schemes),
        trials=_single_int(vals["trials"], "--trials", 1),
        symbols_per_channel=_single_int(vals["symbols"], "--symbols", 1),
        seed=_single_int(vals["seed"], "--seed", 0),
        out_path=vals["out"],
        workers=workers,
    )
    try:
        cfg.points()
    except AntselError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _fmt(x):
    return repr(float(x))


def write_csv(records, path):
    """Write records in order, one row each, floats at round-trip precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            p = rec.point
            writer.writerow(
                [
                    p.scheme,
                    p.m,
                    p.k_s,
                    _fmt(p.phi),
                    _fmt(p.tau),
                    _fmt(p.snr_db),
                    p.trials,
                    p.symbols_per_channel,
                    p.seed,
                    rec.bits_sent,
                    rec.bit_errors,
                    _fmt(rec.ber),
                    _fmt(rec.stderr),
                ]
            )


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"antsel: error: {exc}", file=sys.stderr)
        return exc.exit_status

    points = cfg.points()
    print(f"running {len(points)} points with {cfg.workers} worker(s)", file=sys.stderr)
    try:
        records = run_points(points, workers=cfg.workers)
        write_csv(records, cfg.out_path)
    except OSError as exc:
        print(f"antsel: error: {exc}", file=sys.stderr)
        return 1
    except AntselError as exc:
        print(f"antsel: error: {exc}", file=sys.stderr)
        return 1

    for rec in records:
        p = rec.point
        print(
            f"{p.scheme:>13}  M={p.m:<4d} K_s={p.k_s:<4d} phi={p.phi:<5g} "
            f"tau={p.tau:<5g} snr={p.snr_db:<6g} ber={rec.ber:.4e} (+/- {rec.stderr:.1e})"
        )
    print(f"wrote {cfg.out_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
