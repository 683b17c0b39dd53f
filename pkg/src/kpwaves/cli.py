"""Command-line driver: ``python3 -m kpwaves <subcommand> ...``.

Subcommands:

* ``solve --config C [--out DIR]``: evolve one configuration, write snapshots
  and ``<prefix>_diagnostics.csv``.
* ``compare A B``: Delta_2 / Delta_inf between two snapshot series (files or
  directories). If B holds DS envelopes, u_app is reconstructed first.
* ``fit FILE``: power-law fit of a CSV with (epsilon, delta) columns.
* ``oracle linear SNAP --time T`` / ``oracle break-time SNAP``.
* ``sweep --config C``: expand the ``[sweep]`` lists and run every solve.

Exit codes: 0 ok, 2 config error, 3 numerical blow-up, 4 I/O error. Failures
print one ``kpwaves-error`` line on stderr.
"""

from __future__ import annotations

import argparse
import concurrent.futures as cf
import csv
import io as _io
import math
import sys
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .analysis import field_diff_norms, hopf_break_time, power_law_fit, reconstruct_uapp
from .grid import RealField, SpectralField
from .initial import InitFamily, make_initial
from .integrator import BlowUpError, evolve
from .io import (
    Config,
    ConfigError,
    SnapshotError,
    SnapshotMeta,
    parse_config,
    read_snapshot,
    write_snapshot,
)
from .linear import exact_linear_evolve
from .models import DSState, ModelKind

__all__ = ["run_command", "main", "solve", "expand_sweep", "render_config", "EXIT_CODES"]

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_IO = 0, 2, 3, 4
EXIT_CODES = {"ok": EXIT_OK, "config": EXIT_CONFIG, "blowup": EXIT_BLOWUP, "io": EXIT_IO}

SNAP_SUFFIX = ".kpsnap"


class UsageError(ValueError):
    pass


def _classify(exc: BaseException) -> tuple[int, str]:
    if isinstance(exc, BlowUpError):
        return EXIT_BLOWUP, "blowup"
    if isinstance(exc, (OSError, SnapshotError)):
        return EXIT_IO, "io"
    return EXIT_CONFIG, "config"


def _error_line(code: int, kind: str, exc: BaseException) -> str:
    msg = str(exc).replace("\\", "\\\\").replace('"', '\\"').replace("\n", " ")
    return f'kpwaves-error code={code} kind={kind} type={type(exc).__name__} message="{msg}"'


# --- config rendering and sweeps -------------------------------------------

def _render_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "auto"
    if isinstance(v, ModelKind):
        return v.name
    if isinstance(v, InitFamily):
        return v.value
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ", ".join(_render_value(x) for x in v)
    return str(v)


def render_config(raw: dict) -> str:
    """Config text for a ``{"section.key": value}`` mapping."""
    sections: dict[str, list[str]] = {}
    for dotted, value in raw.items():
        sec, key = dotted.split(".", 1)
        sections.setdefault(sec, []).append(f"{key} = {_render_value(value)}")
    return "\n\n".join(f"[{sec}]\n" + "\n".join(lines) for sec, lines in sections.items()) + "\n"


_SWEEP_TARGET = {
    "epsilon": "model.epsilon",
    "lambda": "model.lambda",
    "sigma": "model.sigma",
    "nu": "model.nu",
    "Nx": "grid.Nx",
    "Ny": "grid.Ny",
    "Lx": "grid.Lx",
    "Ly": "grid.Ly",
    "dt": "run.dt",
}


def expand_sweep(config: Config) -> list[tuple[dict, str]]:
    """Zip the ``[sweep]`` lists (length-1 lists broadcast) into run texts."""
    if not config.sweep:
        return [({}, render_config(config.raw))]
    n = max(len(v) for v in config.sweep.values())
    base = {k: v for k, v in config.raw.items() if not k.startswith("sweep.")}
    runs = []
    for i in range(n):
        overrides = {key: (vals[0] if len(vals) == 1 else vals[i]) for key, vals in config.sweep.items()}
        raw = dict(base)
        for key, value in overrides.items():
            raw[_SWEEP_TARGET[key]] = value
        runs.append((overrides, render_config(raw)))
    return runs


# --- solve -----------------------------------------------------------------

def _initial_state(config: Config):
    u0 = make_initial(config.init, config.grid)
    if config.model.kind is ModelKind.DS:
        return DSState(SpectralField(config.grid, sfft.fft2(u0.values.astype(complex))), 0.0)
    return u0


def _write_state(directory: Path, stem: str, state, t: float, config: Config) -> list[Path]:
    model = config.model
    paths = []
    if isinstance(state, DSState):
        values = state.psi.to_physical()
        # DS snapshots carry the slow time and the carrier epsilon
        meta = SnapshotMeta(t, config.init.epsilon if model.epsilon == 0 else model.epsilon, model.lam, model.kind)
        for part, arr in (("re", values.real), ("im", values.imag)):
            p = directory / f"{stem}_{part}{SNAP_SUFFIX}"
            p.write_bytes(write_snapshot(RealField(state.grid, np.ascontiguousarray(arr)), meta))
            paths.append(p)
    else:
        meta = SnapshotMeta(t, model.epsilon, model.lam, model.kind)
        p = directory / f"{stem}{SNAP_SUFFIX}"
        p.write_bytes(write_snapshot(state, meta))
        paths.append(p)
    return paths


def solve(config: Config, out_dir: str | Path | None = None) -> dict:
    """Run one configuration and write its outputs; returns a summary."""
    directory = Path(out_dir if out_dir is not None else config.output.directory)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = config.output.prefix
    result = evolve(_initial_state(config), config.model, config.run)
    snaps = result.snapshots or [(config.run.t_end, result.final)]
    for i, (t, state) in enumerate(snaps):
        _write_state(directory, f"{prefix}_{i:05d}", state, t, config)
    diag = result.diagnostics
    (directory / f"{prefix}_diagnostics.csv").write_text(diag.to_csv(), encoding="ascii")
    err = diag.err
    return {
        "final_t": config.run.t_end,
        "n_steps": config.run.n_steps,
        "snapshots": len(snaps),
        "max_abs_err": float(np.max(np.abs(err))) if err.size else 0.0,
        "warnings": list(result.warnings),
    }


# --- compare ----------------------------------------------------------------

def _load_series(path: Path) -> list[tuple[object, SnapshotMeta]]:
    """Snapshots at ``path`` (a file or a directory), DS pairs merged."""
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.name.endswith(SNAP_SUFFIX))
    elif path.exists():
        files = [path]
    else:
        raise FileNotFoundError(f"no such snapshot or directory: {path}")
    out = []
    seen = set()
    for f in files:
        if f in seen:
            continue
        name = f.name[: -len(SNAP_SUFFIX)]
        if name.endswith("_re") or name.endswith("_im"):
            base = name[:-3]
            re_p = f.with_name(f"{base}_re{SNAP_SUFFIX}")
            im_p = f.with_name(f"{base}_im{SNAP_SUFFIX}")
            if not (re_p.exists() and im_p.exists()):
                raise SnapshotError(f"incomplete real/imaginary pair for {base}")
            seen.update((re_p, im_p))
            re_f, meta = read_snapshot(re_p.read_bytes())
            im_f, meta_im = read_snapshot(im_p.read_bytes())
            if re_f.grid != im_f.grid or meta != meta_im:
                raise SnapshotError(f"mismatched real/imaginary headers for {base}")
            psi = re_f.values + 1j * im_f.values
            out.append((DSState(SpectralField(re_f.grid, sfft.fft2(psi)), meta.t), meta))
        else:
            seen.add(f)
            out.append(read_snapshot(f.read_bytes()))
    if not out:
        raise SnapshotError(f"no snapshots found in {path}")
    return out


def _compare(a_path: Path, b_path: Path, eta: float) -> str:
    series_a = _load_series(a_path)
    series_b = _load_series(b_path)
    if len(series_a) != len(series_b):
        raise SnapshotError(f"series lengths differ: {len(series_a)} vs {len(series_b)}")
    buf = _io.StringIO()
    buf.write("t,delta2,deltainf\n")
    for (fa, ma), (fb, mb) in zip(series_a, series_b):
        if isinstance(fa, DSState):
            (fa, ma), (fb, mb) = (fb, mb), (fa, ma)
        if isinstance(fa, DSState):
            raise UsageError("compare needs at least one real snapshot series")
        if isinstance(fb, DSState):
            eps = ma.epsilon
            if not eps > 0:
                raise UsageError("u_app reconstruction needs epsilon > 0 in the KP snapshot header")
            fb = reconstruct_uapp(fb, ma.t, eps, eta)
        elif abs(ma.t - mb.t) > 1e-12 * max(1.0, abs(ma.t)):
            raise UsageError(f"snapshot times differ: {ma.t!r} vs {mb.t!r}")
        d2, dinf = field_diff_norms(fa, fb)
        buf.write(f"{ma.t:.17g},{d2:.17g},{dinf:.17g}\n")
    return buf.getvalue()


# --- fit ----------------------------------------------------------------------

def _read_pairs(path: Path) -> tuple[list[float], list[float]]:
    eps, delta = [], []
    with open(path, newline="", encoding="ascii") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                e, d = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not eps:
                    continue  # header row
                raise UsageError(f"{path}: bad row {row!r}") from None
            eps.append(e)
            delta.append(d)
    return eps, delta


# --- sweep -------------------------------------------------------------------

def _sweep_worker(index: int, text: str, out_dir: str, threads: int) -> dict:
    try:
        config = parse_config(text)
        run_dir = Path(out_dir) / f"{config.output.prefix}_{index:03d}"
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / "config.ini").write_text(text, encoding="ascii")
        with sfft.set_workers(threads):
            summary = solve(config, run_dir)
        return {"status": "ok", "exit_code": 0, "message": "", **summary}
    except Exception as exc:  # keep sibling runs alive
        code, _ = _classify(exc)
        return {"status": "failed", "exit_code": code, "message": str(exc)}


_SUMMARY_FIELDS = ["run", "status", "exit_code", "epsilon", "lambda", "sigma", "nu",
                   "Nx", "Ny", "Lx", "Ly", "dt", "n_steps", "max_abs_err", "message"]


def _sweep(config: Config, out_dir: Path, threads: int) -> int:
    runs = expand_sweep(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "sweep_summary.csv"
    rows: dict[int, dict] = {}

    def flush():
        # rewritten after every completion so partial results survive
        with open(summary_path, "w", newline="", encoding="ascii") as fh:
            w = csv.DictWriter(fh, fieldnames=_SUMMARY_FIELDS, extrasaction="ignore")
            w.writeheader()
            for i in sorted(rows):
                w.writerow(rows[i])

    def base_row(i):
        try:
            cfg = parse_config(runs[i][1])
        except ConfigError:
            return {"run": i, **runs[i][0]}
        return {"run": i, "epsilon": cfg.model.epsilon, "lambda": cfg.model.lam,
                "sigma": cfg.model.sigma, "nu": cfg.init.nu, "Nx": cfg.grid.Nx,
                "Ny": cfg.grid.Ny, "Lx": cfg.grid.Lx, "Ly": cfg.grid.Ly, "dt": cfg.run.dt}

    workers = max(1, threads)
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_sweep_worker, i, text, str(out_dir), 1): i
                   for i, (_, text) in enumerate(runs)}
        for fut in cf.as_completed(futures):
            i = futures[fut]
            try:
                res = fut.result()
            except Exception as exc:
                code, _ = _classify(exc)
                res = {"status": "failed", "exit_code": code, "message": str(exc)}
            rows[i] = {**base_row(i), **res}
            flush()
    failed = [rows[i] for i in sorted(rows) if rows[i]["status"] != "ok"]
    print(f"sweep: {len(runs) - len(failed)}/{len(runs)} runs ok; summary in {summary_path}")
    if failed:
        first = failed[0]
        code = int(first["exit_code"]) or EXIT_CONFIG
        kind = {v: k for k, v in EXIT_CODES.items()}.get(code, "config")
        print(_error_line(code, kind, RuntimeError(f"run {first['run']}: {first['message']}")), file=sys.stderr)
        return code
    return EXIT_OK


# --- argument parsing -----------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run configuration file")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--threads", type=int, default=1, help="FFT workers / sweep processes")
    common.add_argument("--seed", type=int, default=None, help="reserved; runs are deterministic")

    parser = argparse.ArgumentParser(prog="kpwaves", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="evolve one configuration")
    p = sub.add_parser("compare", parents=[common], help="Delta_2/Delta_inf of two snapshot series")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)
    p.add_argument("--eta", type=float, default=1.0, help="carrier wavenumber for u_app")
    p = sub.add_parser("fit", parents=[common], help="power-law fit of (epsilon, delta) pairs")
    p.add_argument("csv", type=Path)
    p = sub.add_parser("oracle", parents=[common], help="exact linear flow or Hopf break time")
    p.add_argument("which", choices=["linear", "break-time"])
    p.add_argument("snapshot", type=Path)
    p.add_argument("--time", type=float, default=None, help="evolution time (linear)")
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--row", type=int, default=None, help="y index of the slice (break-time)")
    sub.add_parser("sweep", parents=[common], help="run every entry of the [sweep] lists")
    return parser


def _load_config(path: Path | None) -> Config:
    if path is None:
        raise UsageError("--config is required")
    return parse_config(path.read_text(encoding="utf-8"))


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="ascii")
    print(out / name)


def _dispatch(args) -> int:
    if args.command == "solve":
        config = _load_config(args.config)
        summary = solve(config, args.out)
        print(f"solve: {summary['n_steps']} steps to t={summary['final_t']:.17g}, "
              f"{summary['snapshots']} snapshots, max|err|={summary['max_abs_err']:.3e}")
        return EXIT_OK
    if args.command == "compare":
        _emit(_compare(args.a, args.b, args.eta), args.out, "compare.csv")
        return EXIT_OK
    if args.command == "fit":
        eps, delta = _read_pairs(args.csv)
        print(power_law_fit(eps, delta).format())
        return EXIT_OK
    if args.command == "oracle":
        field, meta = read_snapshot(args.snapshot.read_bytes())
        if args.which == "break-time":
            row = args.row if args.row is not None else int(np.argmin(np.abs(field.grid.y)))
            tc = hopf_break_time(field.values[row], field.grid.hx)
            print("t_c=none" if tc is None else f"t_c={tc:.17g}")
            return EXIT_OK
        if args.time is None:
            raise UsageError("oracle linear needs --time")
        lam = meta.lam if args.lam is None else args.lam
        eps = meta.epsilon if args.epsilon is None else args.epsilon
        result = exact_linear_evolve(field, args.time, lam, eps)
        out_meta = SnapshotMeta(meta.t + args.time, eps, lam, meta.kind)
        target = args.out if args.out is not None else Path(".")
        target.mkdir(parents=True, exist_ok=True)
        path = target / f"oracle_linear{SNAP_SUFFIX}"
        path.write_bytes(write_snapshot(result, out_meta))
        print(path)
        return EXIT_OK
    if args.command == "sweep":
        config = _load_config(args.config)
        out = args.out if args.out is not None else Path(config.output.directory)
        return _sweep(config, out, args.threads)
    raise UsageError(f"unknown command {args.command!r}")


def run_command(argv=None) -> int:
    """Run one subcommand and return its exit code (never raises)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        print(_error_line(EXIT_CONFIG, "config", UsageError("invalid command line")), file=sys.stderr)
        return EXIT_CONFIG
    if args.threads is not None and args.threads < 1:
        print(_error_line(EXIT_CONFIG, "config", UsageError("--threads must be >= 1")), file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "sweep":
            return _dispatch(args)
        with sfft.set_workers(args.threads):
            return _dispatch(args)
    except Exception as exc:
        code, kind = _classify(exc)
        print(_error_line(code, kind, exc), file=sys.stderr)
        return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":  # pragma: no cover
    main()
