"""``kp5`` command line: simulate, convergence ladders and verification suites.

Exit codes: 0 ok, 1 configuration error, 2 blow-up, 3 verification failure.
Every command writes a ``manifest.json`` in its output directory, including
on failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import subprocess
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, fieldio
from .errors import BlowUpError, ConstraintError, Kp5Error, PreconditionError
from .evolution import DEALIAS_MODES, SCHEMES, SimConfig, integrate
from .spectral import GridSpec, SpectralField

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_VERIFY = 0, 1, 2, 3
SERIES_HEADER = ("t", "mass", "energy", "e_norm", "linf")

_CONFIG_KEYS = {
    "nx", "ny", "dt", "t-end", "scheme", "dealias", "c-drift", "record-every",
    "modes", "checkpoint", "seed", "nonlinear",
}
_MODE_KEYS = {"m", "n", "re", "im"}


class ConfigError(Exception):
    """Invalid configuration; the message is anchored at ``path:line``."""


# --- config -------------------------------------------------------------------


def _line_of(text: str, key: str) -> int:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def _number(cfg, key, where, kind=float, positive=False, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"{where(key)}: missing required field '{key}'")
        return default
    v = cfg[key]
    ok = isinstance(v, (int, float)) and not isinstance(v, bool)
    if kind is int:
        ok = ok and float(v).is_integer()
    if not ok or not math.isfinite(v):
        raise ConfigError(f"{where(key)}: field '{key}' must be a finite {kind.__name__}, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{where(key)}: field '{key}' must be > 0, got {v!r}")
    return kind(v)


def load_config(path) -> tuple[dict, SimConfig, SpectralField]:
    """Parse and validate a JSON config; returns (echo, SimConfig, u0).

    A (0, 0) entry in ``modes`` is a constant mean c: it is removed from the
    data and added to ``c-drift`` (the state then evolves u - c).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"{path}:1: cannot read config: {err.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}: invalid JSON: {err.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1: config must be a JSON object")

    def where(key):
        return f"{path}:{_line_of(text, key)}"

    for key in cfg:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{where(key)}: unknown field '{key}'")
    nx = _number(cfg, "nx", where, int, positive=True)
    ny = _number(cfg, "ny", where, int, positive=True)
    try:
        grid = GridSpec(nx, ny)
    except ValueError as err:
        raise ConfigError(f"{where('nx')}: {err}") from None
    dt = _number(cfg, "dt", where, positive=True)
    t_end = _number(cfg, "t-end", where, positive=True)
    c_drift = _number(cfg, "c-drift", where, default=0.0)
    record_every = _number(cfg, "record-every", where, int, positive=True, default=1)
    scheme = cfg.get("scheme", "etdrk4")
    if scheme not in SCHEMES:
        raise ConfigError(f"{where('scheme')}: field 'scheme' must be one of {list(SCHEMES)}, got {scheme!r}")
    dealias = cfg.get("dealias", "three_halves_pad")
    if dealias not in DEALIAS_MODES:
        raise ConfigError(f"{where('dealias')}: field 'dealias' must be one of {list(DEALIAS_MODES)}, "
                          f"got {dealias!r}")
    nonlinear = cfg.get("nonlinear", True)
    if not isinstance(nonlinear, bool):
        raise ConfigError(f"{where('nonlinear')}: field 'nonlinear' must be true or false")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"{where('seed')}: field 'seed' must be a nonnegative integer")
    if dt > t_end:
        raise ConfigError(f"{where('dt')}: field 'dt' ({dt}) must not exceed 't-end' ({t_end})")
    if "modes" in cfg and "checkpoint" in cfg:
        raise ConfigError(f"{where('checkpoint')}: give either 'modes' or 'checkpoint', not both")

    mean = 0.0
    if "checkpoint" in cfg:
        cp = Path(cfg["checkpoint"])
        if not cp.is_absolute():
            cp = path.parent / cp
        try:
            u0 = fieldio.load(cp)
        except (OSError, ValueError, Kp5Error) as err:
            raise ConfigError(f"{where('checkpoint')}: cannot load checkpoint {cp}: {err}") from None
        if u0.grid != grid:
            raise ConfigError(f"{where('checkpoint')}: checkpoint grid {u0.grid.nx}x{u0.grid.ny} "
                              f"differs from config grid {nx}x{ny}")
    else:
        u0, mean = _modes_field(cfg.get("modes", []), grid, where)

    echo = {"nx": nx, "ny": ny, "dt": dt, "t-end": t_end, "scheme": scheme, "dealias": dealias,
            "c-drift": c_drift, "record-every": record_every, "seed": seed, "nonlinear": nonlinear}
    for key in ("modes", "checkpoint"):
        if key in cfg:
            echo[key] = cfg[key]
    echo["resolved-mean"] = mean
    echo["resolved-c-drift"] = c_drift + mean
    sim = SimConfig(grid, dt, t_end, scheme, dealias, c_drift + mean, record_every, nonlinear)
    return echo, sim, u0


def _modes_field(modes, grid: GridSpec, where) -> tuple[SpectralField, float]:
    if not isinstance(modes, list):
        raise ConfigError(f"{where('modes')}: field 'modes' must be a list")
    triples, mean = [], 0.0
    for k, mode in enumerate(modes):
        if not isinstance(mode, dict) or set(mode) - _MODE_KEYS or not {"m", "n"} <= set(mode):
            raise ConfigError(f"{where('modes')}: modes[{k}] must be an object with keys m, n, re, im")
        m, n = mode["m"], mode["n"]
        re_, im_ = mode.get("re", 0.0), mode.get("im", 0.0)
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (m, n)):
            raise ConfigError(f"{where('modes')}: modes[{k}] m and n must be integers")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)
                   for x in (re_, im_)):
            raise ConfigError(f"{where('modes')}: modes[{k}] re and im must be finite numbers")
        lo_m, hi_m = grid.m_range
        lo_n, hi_n = grid.n_range
        if not (lo_m <= m < hi_m and lo_n <= n < hi_n):
            raise ConfigError(f"{where('modes')}: modes[{k}] ({m}, {n}) is outside the resolved, "
                              "non-Nyquist range of the grid")
        if m == 0 and n != 0:
            raise ConfigError(f"{where('modes')}: modes[{k}] ({m}, {n}): the x-mean must not depend on y")
        if m == 0:
            if im_ != 0:
                raise ConfigError(f"{where('modes')}: modes[{k}] the mean (0, 0) must be real")
            mean += float(re_)
            continue
        triples.append((m, n, complex(re_, im_)))
    return SpectralField.from_modes(grid, triples), mean


# --- outputs ------------------------------------------------------------------


def _version() -> str:
    try:
        out = subprocess.run(["git", "describe", "--tags", "--always", "--dirty"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).resolve().parent)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Manifest:
    def __init__(self, command: str, out: Path, argv):
        self.out = out
        self.data = {"command": command, "argv": list(argv), "config_echo": None, "seed": None,
                     "version": _version(), "started_at": _now(), "finished_at": None,
                     "wall_time_s": None, "outputs": [], "status": "precondition_failed"}
        self._t0 = time.perf_counter()

    def add(self, path: Path) -> None:
        self.data["outputs"].append(str(path))

    def write(self, status: str, **extra) -> Path:
        self.data.update(status=status, finished_at=_now(), wall_time_s=time.perf_counter() - self._t0, **extra)
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / "manifest.json"
        path.write_text(json.dumps(self.data, indent=2, default=str) + "\n")
        return path


def _g(x: float) -> str:
    return "%.17g" % x


def write_series(path: Path, records) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for r in records:
            w.writerow([_g(r.t), _g(r.mass), _g(r.energy), _g(r.e_norm), _g(r.linf)])
    return path


# --- commands -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    out = Path(args.out)
    man = Manifest("simulate", out, sys.argv)
    try:
        echo, cfg, u0 = load_config(args.config)
    except (ConfigError, ConstraintError) as err:
        print(f"error: {err}", file=sys.stderr)
        man.write("precondition_failed", error=str(err))
        return EXIT_CONFIG
    man.data.update(config_echo=echo, seed=echo["seed"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        records, final = integrate(u0, cfg, mean=0.0)
    except BlowUpError as err:
        man.add(write_series(out / "series.csv", err.records))
        print(f"error: {err}", file=sys.stderr)
        man.write("blowup", error=str(err), blowup_t=err.t, blowup_max_coeff=err.max_coeff)
        return EXIT_BLOWUP
    man.add(write_series(out / "series.csv", records))
    for p in fieldio.save(final.field, out / "final.kp5f"):
        man.add(p)
    m0, e0 = records[0].mass, records[0].energy
    drift = {
        "mass_drift_rel": max(abs(r.mass - m0) for r in records) / m0 if m0 else 0.0,
        "energy_drift_rel": max(abs(r.energy - e0) for r in records) / abs(e0) if e0 else 0.0,
    }
    man.write("ok", summary=drift)
    print(f"simulate: {len(records)} records, mass drift {drift['mass_drift_rel']:.3e}, "
          f"energy drift {drift['energy_drift_rel']:.3e}")
    return EXIT_OK


def _parse_ladder(text: str) -> list[float]:
    try:
        dts = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--dts: cannot parse {text!r} as a comma-separated list of numbers") from None
    if len(dts) < 3:
        raise ConfigError(f"--dts: need at least 3 time steps, got {len(dts)}")
    if any(not math.isfinite(d) or d <= 0 for d in dts):
        raise ConfigError("--dts: every time step must be a finite number > 0")
    dts = sorted(dts, reverse=True)
    ratios = [dts[i] / dts[i + 1] for i in range(len(dts) - 1)]
    if ratios[0] <= 1 or any(abs(r - ratios[0]) > 1e-9 * ratios[0] for r in ratios):
        raise ConfigError(f"--dts: time steps must form a geometric progression, ratios {ratios}")
    return dts


def fit_order(dts, errors) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    x, y = np.log(np.asarray(dts)), np.log(np.asarray(errors))
    return float(np.polyfit(x, y, 1)[0])


ROUNDOFF_ERROR = 1e-12


def cmd_convergence(args) -> int:
    out = Path(args.out)
    man = Manifest("convergence", out, sys.argv)
    try:
        echo, cfg, u0 = load_config(args.config)
        dts = _parse_ladder(args.dts)
        for dt in dts:
            if dt > cfg.t_end:
                raise ConfigError(f"--dts: time step {dt} exceeds t-end {cfg.t_end}")
    except (ConfigError, ConstraintError) as err:
        print(f"error: {err}", file=sys.stderr)
        man.write("precondition_failed", error=str(err))
        return EXIT_CONFIG
    man.data.update(config_echo={**echo, "dts": dts}, seed=echo["seed"])
    finals = {}
    try:
        for dt in dts:
            c = SimConfig(cfg.grid, dt, cfg.t_end, cfg.scheme, cfg.dealias, cfg.c_drift,
                          10**9, cfg.nonlinear)
            finals[dt] = integrate(u0, c)[1].field
    except BlowUpError as err:
        print(f"error: {err}", file=sys.stderr)
        man.write("blowup", error=str(err))
        return EXIT_BLOWUP
    ref = finals[dts[-1]]
    scale = max(ref.l2_norm(), 1e-300)
    errors = [(finals[dt] - ref).l2_norm() / scale for dt in dts[:-1]]
    out.mkdir(parents=True, exist_ok=True)
    path = out / "convergence.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("dt", "error"))
        for dt, e in zip(dts, errors + [0.0]):
            w.writerow((_g(dt), _g(e)))
    man.add(path)
    if not cfg.nonlinear or max(errors) < ROUNDOFF_ERROR:
        status = "skipped_linear" if not cfg.nonlinear else "skipped_roundoff"
        man.write("ok", order=None, order_status=status, errors=errors)
        print(f"convergence: errors at roundoff (max {max(errors):.3e}); order fit {status}")
        return EXIT_OK
    order = fit_order(dts[:-1], errors)
    ok = 3.5 <= order <= 4.5
    man.write("ok" if ok else "verification_failed", order=order, order_status="fitted", errors=errors)
    print(f"convergence: observed order {order:.3f} ({'within' if ok else 'outside'} [3.5, 4.5])")
    return EXIT_OK if ok else EXIT_VERIFY


def _table(rows) -> str:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)) for r in rows)


def cmd_verify(args) -> int:
    from .verifier import ledger, suites
    from .verifier.estimates import B_VALUES

    out = Path(args.out)
    man = Manifest("verify", out, sys.argv)
    names = ["resonance", "counting", "bilinear"] if args.suite == "all" else [args.suite]
    try:
        rc = Fraction(args.regime_constant)
        if rc <= 0:
            raise ValueError
    except (ValueError, ZeroDivisionError):
        msg = f"--regime-constant must be a positive number, got {args.regime_constant!r}"
        print(f"error: {msg}", file=sys.stderr)
        man.write("precondition_failed", error=msg)
        return EXIT_CONFIG
    b_values = B_VALUES if args.b is None else (args.b,)
    man.data.update(config_echo={"suite": args.suite, "mmax": args.mmax, "trials": args.trials,
                                 "seed": args.seed, "regime_constant": str(rc), "b": list(b_values)},
                    seed=args.seed)
    results, rows = {}, [("suite", "check", "result", "detail")]
    for name in names:
        try:
            if name == "resonance":
                r = suites.resonance_suite(args.mmax, args.seed)
                s = r["sweep"]
                rows.append((name, f"identities |m|,|n|<={args.mmax}", _pf(r["passed"]),
                             f"{s['checked']} checks, {s['resonance_failures']}+{s['gradient_failures']} failures"))
                rows.append((name, "resonant sets vs brute force", _pf(not r["enumeration_failures"]),
                             f"{r['enumeration_cases']} cases, max section ratio {r['max_section_ratio']:.3f}"))
            elif name == "counting":
                r = suites.counting_check(args.trials or 10000, args.seed)
                for k in ("parabola", "monotone"):
                    v = r[k]
                    rows.append((name, k, _pf(v["n_exact_failures"] == 0 and v["n_bound_failures"] == 0),
                                 f"{v['trials']} trials, max count/sharp {v['max_count_over_sharp_bound']:.3f}"))
            else:
                r = suites.bilinear_suite(min(args.mmax, 32), args.trials or 50, args.seed, rc, b_values)
                for kind, v in sorted(r["max_ratio_by_kind"].items()):
                    rows.append((name, kind, "ok", f"max ratio {v:.4g}"))
                if r["vacuous"]:
                    rows.append((name, "vacuous cases", "skip", f"{r['vacuous']} guard excludes all K >= 1"))
                st = r["lowmod_stability"]
                if st:
                    rows.append((name, "lowmod stability 32 vs 8", _pf(st["passed"]),
                                 f"{st['ratio_at_32']:.4g} <= 2 x {st['ratio_at_8']:.4g}"))
                rows.append((name, "oracle", _pf(r["oracle"]["passed"]),
                             f"max rel err {r['oracle']['max_rel_err']:.2e}"))
                rows.append((name, "trilinear constant", _pf(r["trilinear"]["passed"]),
                             f"max {r['trilinear']['max_constant']:.3f} <= {r['trilinear']['cap']}"))
                for c in r["cases"]:
                    if c["status"] == "precondition_failed":
                        rows.append((name, c["params"]["kind"], "FAIL", c["message"]))
                reports = [c["report"] for c in r["cases"] if "report" in c]
                man.add(ledger.append_ledger(out / ledger.LEDGER_NAME, [x.ledger_row() for x in reports]))
                for c in r["cases"]:
                    if "report" in c:
                        c["report"] = c["report"].to_dict()
        except PreconditionError as err:
            r = {"passed": False, "error": str(err)}
            rows.append((name, "precondition", "FAIL", str(err)))
        results[name] = r
    man.add(ledger.write_json(out / "verify_report.json", results))
    print(_table(rows))
    passed = all(r["passed"] for r in results.values())
    man.write("ok" if passed else "verification_failed", passed=passed)
    return EXIT_OK if passed else EXIT_VERIFY


def _pf(ok: bool) -> str:
    return "ok" if ok else "FAIL"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kp5", description="Fifth-order KP-I numerical lab")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", help="integrate from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default="kp5_out")
    s.set_defaults(func=cmd_simulate)
    c = sub.add_parser("convergence", help="self-convergence over a dt ladder")
    c.add_argument("--config", required=True)
    c.add_argument("--dts", required=True, help="comma-separated time steps")
    c.add_argument("--out", default="kp5_out")
    c.set_defaults(func=cmd_convergence)
    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=["resonance", "counting", "bilinear", "all"])
    v.add_argument("--mmax", type=int, default=40)
    v.add_argument("--trials", type=int, default=None,
                   help="trials per case (default: 10000 counting, 50 bilinear)")
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--regime-constant", default="1/8", help="low-modulation guard constant, e.g. 1/8 or 1e-10")
    v.add_argument("--b", type=float, default=None, help="restrict corollary_21 to this b")
    v.add_argument("--out", default="kp5_out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
