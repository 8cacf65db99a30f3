"""Command-line interface: ``classify``, ``sweep`` and ``verify``.

Every option may also come from a JSON file given with ``--config``; keys are
the long option names with dashes replaced by underscores, and options given
on the command line win over the file. Exit status is 0 on success, 1 when
``verify`` finds a residual above threshold and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import bipartite, channels, classify, tangle, verify
from .bipartite import InitialReduced
from .channels import KrausPair, TwoQubitPure
from .errors import DomainError, KrausError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = (
    "p", "rho_ee", "phi", "e0sq", "tau", "c2_sp_se", "c2_s_spe", "c2_e_ssp",
    "c2_sps", "c2_spe", "c2_se", "G", "dS", "dE", "family", "tier",
)

FAMILY_ALIASES = {"ad": "ad", "dephasing": "dephasing", "d": "dephasing",
                  "phase_flip": "phase_flip", "phase-flip": "phase_flip", "pf": "phase_flip"}


class UsageError(Exception):
    pass


def _get(opts: dict, key: str, default):
    val = opts.get(key)
    return default if val is None else val


# --- channel specs ----------------------------------------------------------

def parse_complex_list(text, count: int, what: str) -> np.ndarray:
    """Parse ``count`` complex numbers written as ``re+imj``, comma separated."""
    if isinstance(text, str):
        items = [t for t in text.replace(";", ",").split(",") if t.strip()]
    else:
        items = list(np.asarray(text, dtype=object).reshape(-1))
    try:
        vals = [complex(str(x).strip().replace(" ", "")) for x in items]
    except ValueError as exc:
        raise UsageError(f"{what}: cannot parse complex entries ({exc})") from None
    if len(vals) != count:
        raise UsageError(f"{what}: expected {count} entries, got {len(vals)}")
    return np.array(vals, dtype=complex)


@dataclass(frozen=True)
class ChannelSpec:
    family: str
    k0: Optional[tuple] = None
    k1: Optional[tuple] = None
    unitary: Optional[tuple] = None

    @property
    def parametrized(self) -> bool:
        return self.family in channels.CHANNELS

    def pair(self, p: float = 0.0) -> KrausPair:
        if self.parametrized:
            return channels.CHANNELS[self.family](p)
        if self.family == "custom":
            return KrausPair(np.reshape(self.k0, (2, 2)), np.reshape(self.k1, (2, 2)))
        return channels.kraus_from_unitary(np.reshape(self.unitary, (4, 4)))


def channel_spec(opts: dict) -> ChannelSpec:
    name = opts.get("channel")
    if name is None:
        raise UsageError("--channel is required")
    name = str(name).lower()
    if name in FAMILY_ALIASES:
        return ChannelSpec(FAMILY_ALIASES[name])
    if name == "custom":
        if opts.get("k0") is None or opts.get("k1") is None:
            raise UsageError("--channel custom needs --k0 and --k1")
        k0 = parse_complex_list(opts["k0"], 4, "--k0")
        k1 = parse_complex_list(opts["k1"], 4, "--k1")
        spec = ChannelSpec("custom", k0=tuple(k0), k1=tuple(k1))
    elif name == "unitary":
        if opts.get("unitary") is None:
            raise UsageError("--channel unitary needs --unitary")
        spec = ChannelSpec("unitary", unitary=tuple(parse_complex_list(opts["unitary"], 16, "--unitary")))
    else:
        raise UsageError(f"unknown channel {name!r}")
    try:
        spec.pair()
    except KrausError as exc:
        raise UsageError(str(exc)) from None
    return spec


# --- initial state ----------------------------------------------------------

def _rho_ee_value(value, e0sq: Optional[float]) -> float:
    if isinstance(value, str) and value.lower() in ("lower", "upper"):
        if e0sq is None:
            raise UsageError("--rho-ee lower/upper needs --e0sq")
        lo, hi = bipartite.rho_ee_bounds(e0sq)
        return lo if value.lower() == "lower" else hi
    try:
        return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"--rho-ee: expected a number, 'lower' or 'upper', got {value!r}") from None


def initial_state(opts: dict) -> InitialReduced:
    try:
        if opts.get("psi0") is not None:
            amps = parse_complex_list(opts["psi0"], 4, "--psi0")
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise UsageError("--psi0 is the zero vector")
            amps = amps / norm
            return bipartite.reduced_from_state(TwoQubitPure(*amps))
        phi = float(_get(opts, "phi", 0.0))
        e0sq = None if opts.get("e0sq") is None else float(opts["e0sq"])
        if opts.get("rho_ee") is None:
            raise UsageError("give the initial state via --psi0 or --rho-ee with --e0sq/--rho-ge")
        rho_ee = _rho_ee_value(opts["rho_ee"], e0sq)
        if opts.get("rho_ge") is not None:
            if e0sq is not None:
                raise UsageError("--e0sq and --rho-ge are mutually exclusive")
            return InitialReduced(rho_ee, phi, float(opts["rho_ge"]))
        if e0sq is None:
            raise UsageError("--rho-ee needs --e0sq or --rho-ge")
        return InitialReduced.from_e0sq(rho_ee, phi, e0sq)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


# --- classify ---------------------------------------------------------------

def format_report(kp: KrausPair, r0: InitialReduced, tol: float) -> str:
    rep = classify.entanglement_report(kp, r0, tol)
    cls = classify.classify(kp, r0, tol)
    lines = [
        f"family            {cls.family}",
        f"decided by        {cls.tier}",
        "",
        f"rho_ee            {r0.rho_ee + 0.0:.12g}",
        f"phi               {r0.phi + 0.0:.12g}",
        f"|rho_ge|          {r0.rho_ge_abs + 0.0:.12g}",
        f"E0^2              {r0.e0sq + 0.0:.12g}",
        "",
        f"tau               {rep.tau + 0.0:.12g}",
        f"C2_S'|SE          {rep.c2_sp_se + 0.0:.12g}",
        f"C2_S|S'E          {rep.c2_s_spe + 0.0:.12g}",
        f"C2_E|SS'          {rep.c2_e_ssp + 0.0:.12g}",
        f"C2_S'S            {rep.c2_sps + 0.0:.12g}",
        f"C2_S'E            {rep.c2_spe + 0.0:.12g}",
        f"C2_SE             {rep.c2_se + 0.0:.12g}",
        f"D_S               {rep.dS + 0.0:.12g}",
        f"D_E               {rep.dE + 0.0:.12g}",
        f"G                 {rep.G + 0.0:.12g}",
        "",
        f"u = 4det(K0K1)    {cls.u:.12g}",
        f"v = g(K0,K1)^2    {cls.v:.12g}",
        f"|u - v|           {cls.gap:.6e}",
        f"|detK0|+|detK1|   {cls.det_sum + 0.0:.12g}",
        f"S-separable res.  {cls.bisep_s_residual:.6e}",
        f"E-separable res.  {cls.bisep_e_residual:.6e}",
    ]
    return "\n".join(lines) + "\n"


def cmd_classify(opts: dict, out) -> int:
    spec = channel_spec(opts)
    p = _p_value(opts, spec)
    r0 = initial_state(opts)
    tol = float(_get(opts, "tol", classify.DEFAULT_TOL))
    try:
        kp = spec.pair(p)
    except KrausError as exc:
        raise UsageError(str(exc)) from None
    out.write(format_report(kp, r0, tol))
    return EXIT_OK


def _p_value(opts: dict, spec: ChannelSpec) -> float:
    if not spec.parametrized:
        return 0.0
    if opts.get("p") is None:
        raise UsageError(f"--channel {spec.family} needs --p")
    p = float(opts["p"])
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {p!r}")
    return p


# --- sweep ------------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    channel: str
    axis: str  # "rho_ee" (E0^2 = 0.4 fixed) or "e0sq" (rho_ee = 0.5 fixed)
    columns: tuple
    title: str


PRESETS = {
    1: Preset("ad", "rho_ee", ("c2_e_ssp",), "AD: C2_E|SS' vs p, rho_ee at E0^2=0.4"),
    2: Preset("ad", "rho_ee", ("c2_s_spe",), "AD: C2_S|S'E vs p, rho_ee at E0^2=0.4"),
    3: Preset("ad", "e0sq", ("c2_s_spe", "c2_e_ssp"), "AD: C2_S|S'E, C2_E|SS' vs p, E0^2 at rho_ee=0.5"),
    4: Preset("dephasing", "rho_ee", ("c2_e_ssp", "tau"), "D: C2_E|SS', tau vs p, rho_ee at E0^2=0.4"),
    5: Preset("dephasing", "rho_ee", ("c2_s_spe", "tau"), "D: C2_S|S'E, tau vs p, rho_ee at E0^2=0.4"),
    6: Preset("dephasing", "e0sq", ("tau",), "D: tau vs p, E0^2 at rho_ee=0.5"),
    7: Preset("phase_flip", "rho_ee", ("c2_e_ssp", "tau"), "PF: C2_E|SS', tau vs p, rho_ee at E0^2=0.4"),
    8: Preset("phase_flip", "rho_ee", ("c2_s_spe", "tau"), "PF: C2_S|S'E, tau vs p, rho_ee at E0^2=0.4"),
    9: Preset("phase_flip", "e0sq", ("tau",), "PF: tau vs p, E0^2 at rho_ee=0.5"),
}
PRESET_E0SQ = 0.4
PRESET_RHO_EE = 0.5
DEFAULT_GRID = 50


def preset_options(figure: int, grid: int) -> dict:
    if figure not in PRESETS:
        raise UsageError(f"--figure must be one of 1..9, got {figure}")
    pr = PRESETS[figure]
    opts = {"channel": pr.channel, "p_grid": [0.0, 1.0, grid], "phi": 0.0}
    if pr.axis == "rho_ee":
        opts["e0sq"] = PRESET_E0SQ
        opts["rho_ee_grid"] = "bounds"
    else:
        opts["rho_ee"] = PRESET_RHO_EE
        opts["e0sq_grid"] = [0.0, 1.0, grid]
    opts["rho_ee_grid_count"] = grid
    return opts


def _linspace(spec, what: str) -> list:
    try:
        start, stop, count = spec
        count = int(count)
        start, stop = float(start), float(stop)
    except (TypeError, ValueError):
        raise UsageError(f"{what}: expected START STOP COUNT") from None
    if count < 1:
        raise UsageError(f"{what}: empty grid (count = {count})")
    if count == 1:
        return [start]
    return [float(x) for x in np.linspace(start, stop, count)]


def _axis(opts: dict, name: str, fixed_default=None) -> Optional[list]:
    grid = opts.get(f"{name}_grid")
    if grid is not None and not (isinstance(grid, str) and grid == "bounds"):
        return _linspace(grid, f"--{name.replace('_', '-')}-grid")
    if opts.get(name) is not None:
        return [opts[name]]
    return fixed_default


def sweep_grid(opts: dict, spec: ChannelSpec):
    """Grid points in output order (p outer, then rho_ee, then E0^2) and the
    number of infeasible combinations dropped."""
    if spec.parametrized:
        p_grid = opts.get("p_grid")
        ps = _linspace(p_grid, "--p-grid") if p_grid is not None else (
            [float(opts["p"])] if opts.get("p") is not None else None)
        if ps is None:
            raise UsageError("sweep needs --p or --p-grid")
        if any(not 0.0 <= p <= 1.0 for p in ps):
            raise UsageError("p values must lie in [0, 1]")
    else:
        ps = [0.0]
    e0s = _axis(opts, "e0sq")
    if e0s is None:
        raise UsageError("sweep needs --e0sq or --e0sq-grid")
    e0s = [float(x) for x in e0s]
    if any(not 0.0 <= x <= 1.0 for x in e0s):
        raise UsageError("E0^2 values must lie in [0, 1]")
    phi = float(_get(opts, "phi", 0.0))

    bounds = isinstance(opts.get("rho_ee_grid"), str) and opts["rho_ee_grid"] == "bounds"
    if bounds:
        if len(e0s) != 1:
            raise UsageError("--rho-ee-grid bounds needs a single --e0sq value")
        lo, hi = bipartite.rho_ee_bounds(e0s[0])
        rhos = _linspace([lo, hi, _get(opts, "rho_ee_grid_count", DEFAULT_GRID)], "--rho-ee-grid")
    else:
        rhos = _axis(opts, "rho_ee")
        if rhos is None:
            raise UsageError("sweep needs --rho-ee or --rho-ee-grid")
        rhos = [_rho_ee_value(r, e0s[0] if len(e0s) == 1 else None) for r in rhos]
    if any(not 0.0 <= r <= 1.0 for r in rhos):
        raise UsageError("rho_ee values must lie in [0, 1]")

    points, skipped = [], 0
    for p in ps:
        for r in rhos:
            for e in e0s:
                if e > 4.0 * r * (1.0 - r) + 1e-12:
                    skipped += 1
                    continue
                points.append((p, r, phi, e))
    return points, skipped


def _fmt(x: float) -> str:
    return "%.17g" % (x + 0.0)


def sweep_row(spec: ChannelSpec, point, tol: float) -> list:
    p, rho_ee, phi, e0sq = point
    kp = spec.pair(p)
    r0 = InitialReduced.from_e0sq(rho_ee, phi, e0sq)
    rep = classify.entanglement_report(kp, r0, tol)
    nums = (p, rho_ee, phi, e0sq, rep.tau, rep.c2_sp_se, rep.c2_s_spe, rep.c2_e_ssp,
            rep.c2_sps, rep.c2_spe, rep.c2_se, rep.G, rep.dS, rep.dE)
    return [_fmt(x) for x in nums] + [rep.class_label, rep.tier]


def _rows_chunk(args):
    spec, points, tol = args
    return [sweep_row(spec, pt, tol) for pt in points]


def sweep_rows(spec: ChannelSpec, points, tol: float, jobs: int = 1) -> list:
    """Evaluate grid points, optionally in worker processes, keeping grid order."""
    if jobs <= 1 or len(points) < 2:
        return _rows_chunk((spec, points, tol))
    size = max(1, math.ceil(len(points) / (4 * jobs)))
    chunks = [(spec, points[i:i + size], tol) for i in range(0, len(points), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [row for part in pool.map(_rows_chunk, chunks) for row in part]


def write_csv(rows, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)


def cmd_sweep(opts: dict, out, err) -> int:
    if opts.get("figure") is not None:
        grid = int(_get(opts, "grid", DEFAULT_GRID))
        if grid < 1:
            raise UsageError(f"--grid must be positive, got {grid}")
        figure = int(opts["figure"])
        base = preset_options(figure, grid)
        # explicit options still override the preset
        opts = {**base, **{k: v for k, v in opts.items() if v is not None and k not in ("figure", "grid")}}
        err.write(f"preset {figure}: {PRESETS[figure].title}\n")
    spec = channel_spec(opts)
    points, skipped = sweep_grid(opts, spec)
    if not points:
        raise UsageError("sweep grid is empty after dropping infeasible points")
    tol = float(_get(opts, "tol", classify.DEFAULT_TOL))
    rows = sweep_rows(spec, points, tol, int(_get(opts, "jobs", 1)))
    buf = io.StringIO()
    write_csv(rows, buf)
    target = opts.get("output") or "-"
    if target == "-":
        out.write(buf.getvalue())
    else:
        try:
            with open(target, "w", newline="", encoding="utf-8") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise UsageError(f"cannot write {target}: {exc}") from None
    err.write(f"{len(rows)} rows written, {skipped} infeasible grid points skipped\n")
    return EXIT_OK


# --- verify -----------------------------------------------------------------

VERIFY_TOL = 1e-9


def format_table(table: verify.Table, tol: float) -> tuple[str, bool]:
    width = max(len(k) for k in table)
    lines, ok = [], True
    for name, (worst, count) in table.items():
        # a mismatch is a count of disagreements, so any nonzero value fails
        limit = 0.0 if name == "classification mismatch" else tol
        bad = worst > limit
        ok &= not bad
        lines.append(f"{name:<{width}}  max {worst:.3e}  n {count:>6d}  {'FAIL' if bad else 'ok'}")
    lines.append(f"{'PASS' if ok else 'FAIL'} (tol {tol:.1e})")
    return "\n".join(lines) + "\n", ok


def cmd_verify(opts: dict, out) -> int:
    n = int(_get(opts, "n", 100))
    if n < 1:
        raise UsageError(f"--n must be at least 1, got {n}")
    seed = int(_get(opts, "seed", 0))
    tol = float(opts["tol"]) if opts.get("tol") is not None else VERIFY_TOL
    text, ok = format_table(verify.run(n, seed), tol)
    out.write(f"verify n={n} seed={seed}\n" + text)
    return EXIT_OK if ok else EXIT_FAIL


# --- argument parsing -------------------------------------------------------

COMPLEX_HELP = "four complex entries a,b,c,d (row major) written re+imj, e.g. 0.5-0.5j"


def _channel_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("channel")
    g.add_argument("--channel", help="ad, dephasing, phase_flip, custom or unitary")
    g.add_argument("--p", type=float, help="channel strength in [0, 1]")
    g.add_argument("--k0", help="custom K0: " + COMPLEX_HELP)
    g.add_argument("--k1", help="custom K1: " + COMPLEX_HELP)
    g.add_argument("--unitary", help="16 complex entries of the S-E unitary, row major, basis |s e>")


def _state_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("initial state of S")
    g.add_argument("--e0sq", type=float, help="initial S'-S tangle E0^2")
    g.add_argument("--rho-ee", help="excited population, or 'lower'/'upper' for the bounds at E0^2")
    g.add_argument("--rho-ge", type=float, help="|rho_ge| (instead of --e0sq)")
    g.add_argument("--phi", type=float, help="coherence phase (default 0)")
    g.add_argument("--psi0", help="four amplitudes alpha,beta,gamma,delta of |11>,|10>,|01>,|00>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kraustangle",
        description="Entanglement of a qubit pair S'-S when S evolves through a two-Kraus channel.",
        epilog="Options can also be read from a JSON file via --config (keys use underscores).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="family and tangles at one point")
    _channel_args(c)
    _state_args(c)

    s = sub.add_parser("sweep", help="CSV of tangles over a parameter grid")
    _channel_args(s)
    _state_args(s)
    g = s.add_argument_group("grid")
    g.add_argument("--figure", type=int, help="preset grid 1..9")
    g.add_argument("--grid", type=int, help=f"points per axis for presets (default {DEFAULT_GRID})")
    for name in ("p", "rho-ee", "e0sq"):
        g.add_argument(f"--{name}-grid", nargs=3, metavar=("START", "STOP", "COUNT"))
    s.add_argument("--output", "-o", help="CSV path (default stdout)")
    s.add_argument("--jobs", type=int, help="worker processes (default 1)")

    v = sub.add_parser("verify", help="closed forms against brute force on random instances")
    v.add_argument("--n", type=int, help="number of instances (default 100)")
    v.add_argument("--seed", type=int, help="RNG seed (default 0)")

    for sp in (c, s, v):
        sp.add_argument("--tol", type=float, help="numerical tolerance")
        sp.add_argument("--config", help="JSON file with default option values")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if v is not None}
    command = flags.pop("command")
    try:
        opts = _load_config(flags["config"]) if "config" in flags else {}
        opts.update(flags)
        opts.pop("config", None)
        if command == "classify":
            return cmd_classify(opts, out)
        if command == "sweep":
            return cmd_sweep(opts, out, err)
        return cmd_verify(opts, out)
    except (UsageError, DomainError, KrausError) as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog} {command}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
