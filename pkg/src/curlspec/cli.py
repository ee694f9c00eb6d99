"""Command-line front end: ``curlspec <command> [options]``.

Every command writes its results under ``--output-dir`` and prints a short
summary. Exit status is 0 on success, 1 when a verification fails and 2 on
usage errors. Options may also come from a ``key=value`` config file; flags
win over the file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import antisym_tube as at
from . import exact_rational as er
from . import grad_shafranov as gs
from . import symmetry_decider as sd
from .sections import DegenerateSectionError, Disk, GridMask, Rectangle

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

THM2_DET_TOL = 1e-6


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    grid_h: float | None = None
    scan_step: float = 0.01
    alpha_max: float = 10.0
    m_max: int = 8
    n_ell_max: int = 8
    output_dir: Path = Path("curlspec-out")
    format: str = "csv"
    threads: int = 1


# built-in defaults for every option that may also come from a config file
DEFAULTS = {
    "output_dir": "curlspec-out",
    "format": "csv",
    "scan_step": 0.01,
    "alpha_max": 10.0,
    "m_max": 8,
    "n_ell_max": 8,
    "grid_h": None,
    # verify-appendix-d
    "s": "287/100",
    "M": 5,
    "golden": None,
    # reproduce-thm1
    "R": 1.0,
    "a_range": "0.01:0.5:0.01",
    # reproduce-thm2
    "b": 1.0,
    "n_max": 20,
    # scan
    "family": "disk",
    "a": None,
    "L": None,
    "lambda_max": None,
    # gs
    "section": "disk",
    "disk_R": 1.0,
    "disk_a": 0.1,
    "r_lo": 1.0,
    "r_hi": 2.0,
    "z_lo": -1.0,
    "z_hi": 1.0,
    "mask_file": None,
    "richardson": False,
}

_TYPES = {
    "scan_step": float,
    "alpha_max": float,
    "m_max": int,
    "n_ell_max": int,
    "grid_h": float,
    "M": int,
    "R": float,
    "b": float,
    "n_max": int,
    "a": float,
    "L": float,
    "lambda_max": float,
    "disk_R": float,
    "disk_a": float,
    "r_lo": float,
    "r_hi": float,
    "z_lo": float,
    "z_hi": float,
}


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def read_config(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key, value):
    if value is None:
        return None
    if key == "richardson":
        return value if isinstance(value, bool) else _parse_bool(value)
    kind = _TYPES.get(key)
    if kind is None:
        return value
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"option {key} expects {kind.__name__}, got {value!r}") from exc


def resolve(args) -> dict:
    """Merge flags, config file and defaults (in that order of precedence)."""
    cfg = read_config(args.config) if args.config else {}
    merged = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            merged[key] = _coerce(key, flag)
        elif key in cfg:
            merged[key] = _coerce(key, cfg[key])
        else:
            merged[key] = default
    if merged["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return merged


def _threads():
    raw = os.environ.get("CURLSPEC_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"CURLSPEC_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError("CURLSPEC_THREADS must be a positive integer")
    return n


def run_config(opts) -> RunConfig:
    cfg = RunConfig(
        grid_h=opts["grid_h"],
        scan_step=opts["scan_step"],
        alpha_max=opts["alpha_max"],
        m_max=opts["m_max"],
        n_ell_max=opts["n_ell_max"],
        output_dir=Path(opts["output_dir"]),
        format=opts["format"],
        threads=_threads(),
    )
    if cfg.grid_h is not None and not cfg.grid_h > 0:
        raise UsageError("--grid-h must be positive")
    if not (0 < cfg.scan_step <= 0.01):
        raise UsageError("--scan-step must lie in (0, 0.01]")
    if cfg.alpha_max < 10:
        raise UsageError("--alpha-max must be at least 10")
    if cfg.m_max < 0 or cfg.n_ell_max < 0:
        raise UsageError("mode caps must be non-negative")
    return cfg


# --- output helpers -----------------------------------------------------------------


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def write_json(path: Path, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def _say(msg):
    print(msg)


def _err(msg):
    print(msg, file=sys.stderr)


# --- verify-appendix-d ----------------------------------------------------------------


def _load_golden(path):
    if path is None:
        text = resources.files("curlspec").joinpath("data/appendix_d_golden.json").read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read golden file: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"golden file is not valid JSON: {exc}") from exc


def cmd_verify_appendix_d(opts, cfg: RunConfig):
    try:
        s = Fraction(str(opts["s"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--s must be a rational such as 287/100: {exc}") from exc
    try:
        cert = er.certify_negativity(s, opts["M"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    golden = _load_golden(opts["golden"])
    try:
        problems = er.compare_with_golden(cert, golden)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed golden file: {exc}") from exc
    out = cfg.output_dir / "appendix_d_certificate.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(cert.to_json())
    for name, val in cert.values().items():
        _say(f"{name} = {val}")
    _say(f"verdict = {str(cert.verdict).lower()}")
    _say(f"wrote {out}")
    if problems:
        _err("golden mismatch:")
        for p in problems:
            _err(f"  {p}")
    if not cert.verdict:
        failed = [h.name for h in cert.hypotheses if not h.holds]
        _err(f"certificate fails: {', '.join(failed) or 'combined bound not negative'}")
    return EXIT_OK if cert.verdict and not problems else EXIT_FAIL


# --- reproduce-thm1 ----------------------------------------------------------------------


def parse_range(text):
    """``start:stop:step`` with an inclusive stop."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError("--a-range must look like start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"--a-range: {exc}") from exc
    if not step > 0:
        raise UsageError("--a-range step must be positive")
    if stop < start:
        raise UsageError("--a-range is empty")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def cmd_reproduce_thm1(opts, cfg: RunConfig):
    R = opts["R"]
    if not R > 0:
        raise UsageError("--R must be positive")
    a_vals = parse_range(opts["a_range"])
    bad = [a for a in a_vals if not (0 < a < R)]
    if bad:
        raise UsageError(f"--a-range values must lie in (0, R); offending value {bad[0]}")
    js = at.j_star(alpha_max=cfg.alpha_max, step=min(cfg.scan_step, 0.005))
    a_star = sd.theorem1_crossover(R, js.lower)
    rows = []
    for a in a_vals:
        v = sd.decide(sd.StandardTorus(a, R), jstar=js)
        row = {
            "a": a,
            "sym_upper": v.sym_bound,
            "antisym_lower": v.antisym_bound,
            "verdict": v.verdict.value,
            "margin": v.margin,
        }
        if cfg.grid_h is not None:
            # grid_h is a fraction of the minor radius here
            est = gs.grad_shafranov_lambda1(Disk(R, a), cfg.grid_h * a, with_bracket=False)
            row["lambda1_s_numeric"] = math.sqrt(est.value)
        rows.append(row)
    header = list(rows[0])
    if cfg.format == "csv":
        out = cfg.output_dir / "thm1.csv"
        write_csv(out, header, [[r[k] for k in header] for r in rows])
    else:
        out = cfg.output_dir / "thm1.json"
        write_json(out, {"R": R, "crossover_a": a_star, "j_star": js.provenance(), "rows": rows})
    n_sym = sum(r["verdict"] == "Symmetric" for r in rows)
    _say(f"j* = {js.value:.10f} +- {js.error_bar:.2e} (lower bound used {js.lower:.10f})")
    _say(f"crossover a*(R={_fmt(R)}) = {a_star:.10f}")
    _say(f"{n_sym} of {len(rows)} rows Symmetric")
    _say(f"wrote {out}")
    return EXIT_OK


# --- reproduce-thm2 ------------------------------------------------------------------------


def cmd_reproduce_thm2(opts, cfg: RunConfig):
    b = opts["b"]
    if not b > 0:
        raise UsageError("--b must be positive")
    n_max = opts["n_max"]
    if n_max < 1:
        raise UsageError("--n-max must be at least 1")
    try:
        p = at.find_theorem2_parameters(b)
    except at.RootNotFoundError as exc:
        _err(f"root search failed: {exc}")
        for lo, hi in exc.brackets:
            _err(f"  sign change in [{lo!r}, {hi!r}]")
        return EXIT_FAIL
    det, scale = at.annulus_determinant_terms(p.a, b, p.mode(1), p.lam)
    det = float(det)
    rel = float(abs(det) / scale)
    failures = []
    if abs(p.g_residual) >= sd.G_RESIDUAL_TOL:
        failures.append(f"|g| residual {abs(p.g_residual):.3e} not below {sd.G_RESIDUAL_TOL}")
    if abs(det) >= THM2_DET_TOL:
        failures.append(f"determinant residual {abs(det):.3e} not below {THM2_DET_TOL}")
    try:
        tb = sd.theorem2_bounds(p.a, b, p.L)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_FAIL
    table = []
    for n in range(1, n_max + 1):
        v = sd.decide(sd.AnnularCylinderFamily(p.a, b, p.L, n))
        table.append({"n": n, "antisym_upper": v.antisym_bound, "sym_lower": v.sym_bound,
                      "verdict": v.verdict.value, "margin": v.margin})
        if n >= tb.N_threshold and v.verdict is not sd.Verdict.ASYMMETRIC:
            failures.append(f"n = {n} >= N_threshold but verdict {v.verdict.value}")
    report = {
        "r": p.r,
        "b": b,
        "a": p.a,
        "L": p.L,
        "lambda": p.lam,
        "ell": p.ell,
        "g_residual": p.g_residual,
        "determinant_residual": det,
        "determinant_relative": rel,
        "sym_lower": tb.sym_lower,
        "antisym_limit": tb.limit,
        "N_threshold": tb.N_threshold,
        "alternative_roots": p.alternatives,
        "table": table,
    }
    out = cfg.output_dir / "thm2.json"
    write_json(out, report)
    if cfg.format == "csv":
        out = cfg.output_dir / "thm2_parameters.csv"
        write_csv(out, ["r", "b", "a_root", "L", "lambda", "N_threshold"],
                  [[p.r, b, p.a, p.L, p.lam, tb.N_threshold]])
        keys = ["n", "antisym_upper", "sym_lower", "verdict", "margin"]
        write_csv(cfg.output_dir / "thm2_table.csv", keys, [[t[k] for k in keys] for t in table])
    _say(f"r = {p.r:.12f}  a = {p.a:.12f}  L = {p.L:.12f}  lambda = {p.lam:.12f}")
    _say(f"|g| residual = {abs(p.g_residual):.3e}  determinant residual = {abs(det):.3e}")
    _say(f"N_threshold = {tb.N_threshold}")
    _say(f"wrote {out}")
    for f in failures:
        _err(f)
    return EXIT_FAIL if failures else EXIT_OK


# --- scan -----------------------------------------------------------------------------------


def cmd_scan(opts, cfg: RunConfig):
    family = opts["family"]
    step = cfg.scan_step
    if family == "disk":
        a = opts["a"] if opts["a"] is not None else 1.0
        L = opts["L"] if opts["L"] is not None else 2 * math.pi
        if not (a > 0 and L > 0):
            raise UsageError("disk scan needs a > 0 and L > 0")
        lam_max = opts["lambda_max"] if opts["lambda_max"] is not None else 8.0 / a
        roots = at.disk_roots(a, L, cfg.m_max, cfg.n_ell_max, lam_max, step, cfg.threads)
        geom = {"family": "disk", "a": a, "L": L}
    elif family == "annulus":
        b = opts["b"]
        if opts["a"] is None and opts["L"] is None:
            p = at.find_theorem2_parameters(b)
            a, L = p.a, p.L
        elif opts["a"] is None or opts["L"] is None:
            raise UsageError("annulus scan needs both --a and --L (or neither)")
        else:
            a, L = opts["a"], opts["L"]
        if not (0 < a < b and L > 0):
            raise UsageError("annulus scan needs 0 < a < b and L > 0")
        lam_max = opts["lambda_max"] if opts["lambda_max"] is not None else 8.0 / (b - a)
        roots = at.annulus_roots(a, b, L, cfg.m_max, cfg.n_ell_max, lam_max, step, cfg.threads)
        geom = {"family": "annulus", "a": a, "b": b, "L": L}
    else:
        raise UsageError("--family must be disk or annulus")
    if not lam_max > 0:
        raise UsageError("--lambda-max must be positive")
    header = ["m", "n_ell", "ell", "lambda", "alpha", "kappa_root"]
    rows = [[r.m, r.n_ell, r.ell, r.lam, a * r.ell, a * r.lam] for r in roots]
    if cfg.format == "csv":
        out = cfg.output_dir / f"scan_{family}.csv"
        write_csv(out, header, rows)
    else:
        out = cfg.output_dir / f"scan_{family}.json"
        write_json(out, {**geom, "lambda_max": lam_max, "m_max": cfg.m_max,
                         "n_ell_max": cfg.n_ell_max, "scan_step": step,
                         "roots": [dict(zip(header, r)) for r in rows]})
    _say(f"{len(rows)} roots with lambda <= {_fmt(float(lam_max))}")
    if rows:
        _say(f"smallest lambda = {rows[0][3]:.12f} (m = {rows[0][0]}, n_ell = {rows[0][1]})")
    _say(f"wrote {out}")
    return EXIT_OK


# --- gs ------------------------------------------------------------------------------------


def _section_from(opts, cfg: RunConfig):
    kind = opts["section"]
    try:
        if kind == "disk":
            sec = Disk(opts["disk_R"], opts["disk_a"])
            h = cfg.grid_h if cfg.grid_h is not None else sec.a / 32
        elif kind == "rectangle":
            sec = Rectangle(opts["r_lo"], opts["r_hi"], opts["z_lo"], opts["z_hi"])
            h = cfg.grid_h if cfg.grid_h is not None else (sec.r_hi - sec.r_lo) / 32
        elif kind == "mask":
            if not opts["mask_file"]:
                raise UsageError("--section mask needs --mask-file")
            try:
                sec = GridMask.read(opts["mask_file"])
            except OSError as exc:
                raise UsageError(f"cannot read mask file: {exc}") from exc
            h = sec.h
        else:
            raise UsageError("--section must be disk, rectangle or mask")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if h >= (sec.r_max - sec.r_min) / 2:
        raise UsageError(f"--grid-h {h} does not resolve the section")
    return sec, h


def _study(solver, sec, h):
    st = gs.richardson_study(solver, sec, h)
    return {"spacings": st.spacings, "values": st.values, "order": st.order, "error": st.error}


def cmd_gs(opts, cfg: RunConfig):
    sec, h = _section_from(opts, cfg)
    if opts["richardson"] and isinstance(sec, GridMask):
        raise UsageError("--richardson needs an analytic section, not a mask")
    try:
        est = gs.grad_shafranov_lambda1(sec, h)
        ff = gs.fluxfree_eigenpair(sec, h)
    except DegenerateSectionError as exc:
        raise UsageError(f"degenerate geometry: {exc}") from exc
    lam_d = est.laplacian_value
    lam_s = math.sqrt(est.value)
    slack = 0.0
    report = {
        "section": opts["section"],
        "grid_h": h,
        "lambda1_D": lam_d,
        "lambda1_GS": est.value,
        "lambda1_s": lam_s,
        "lambda1_sFF": ff.lam,
        "bracket_low": est.bracket_low,
        "bracket_high": est.bracket_high,
        "fluxfree_weighted_mean": ff.weighted_mean,
        "fluxfree_relative_mean": ff.relative_mean,
        "sFF_exceeds_s": ff.lam > lam_s,
    }
    if opts["richardson"]:
        rich = {
            "GS": _study(gs.grad_shafranov_lambda1, sec, h),
            "D": _study(gs.laplacian_dirichlet_lambda1, sec, h),
            "sFF": _study(gs.symmetric_fluxfree_lambda1, sec, h),
        }
        report["richardson"] = rich
        slack = 3.0 * rich["GS"]["error"]
    report["bracket_slack"] = slack
    report["bracket_contains"] = (
        est.bracket_low - slack <= est.value <= est.bracket_high + slack
    )
    if cfg.format == "json":
        out = cfg.output_dir / "gs.json"
        write_json(out, report)
    else:
        out = cfg.output_dir / "gs.csv"
        flat = {k: v for k, v in report.items() if k != "richardson"}
        for name, st in report.get("richardson", {}).items():
            flat[f"richardson_order_{name}"] = st["order"]
            flat[f"richardson_error_{name}"] = st["error"]
        write_csv(out, list(flat), [list(flat.values())])
    _say(f"lambda1_D   = {lam_d:.12g}")
    _say(f"lambda1_GS  = {est.value:.12g}  bracket [{est.bracket_low:.12g}, {est.bracket_high:.12g}]")
    _say(f"lambda1_s   = {lam_s:.12g}")
    _say(f"lambda1_sFF = {ff.lam:.12g}")
    if "richardson" in report:
        _say(f"Richardson order (GS) = {report['richardson']['GS']['order']:.4f}")
    _say(f"wrote {out}")
    ok = report["bracket_contains"] and report["sFF_exceeds_s"]
    if not ok:
        _err("verification failed: bracket containment or flux-free ordering")
    return EXIT_OK if ok else EXIT_FAIL


# --- parser ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file with option defaults")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--grid-h", dest="grid_h", type=float)
    common.add_argument("--scan-step", dest="scan_step", type=float)
    common.add_argument("--alpha-max", dest="alpha_max", type=float)
    common.add_argument("--m-max", dest="m_max", type=int)
    common.add_argument("--n-ell-max", dest="n_ell_max", type=int)

    parser = argparse.ArgumentParser(prog="curlspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-appendix-d", parents=[common],
                       help="exact-rational negativity certificate")
    p.add_argument("--s", dest="s", help="rational argument, default 287/100")
    p.add_argument("--M", dest="M", type=int, help="Taylor truncation index, default 5")
    p.add_argument("--golden", help="golden JSON to compare against")
    p.set_defaults(func=cmd_verify_appendix_d)

    p = sub.add_parser("reproduce-thm1", parents=[common],
                       help="thin standard tori: symmetric verdict sweep over a")
    p.add_argument("--R", dest="R", type=float)
    p.add_argument("--a-range", dest="a_range", help="start:stop:step, stop inclusive")
    p.set_defaults(func=cmd_reproduce_thm1)

    p = sub.add_parser("reproduce-thm2", parents=[common],
                       help="annular cylinders with asymmetric first eigenfield")
    p.add_argument("--b", dest="b", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.set_defaults(func=cmd_reproduce_thm2)

    p = sub.add_parser("scan", parents=[common], help="antisymmetric dispersion roots")
    p.add_argument("--family", choices=("disk", "annulus"))
    p.add_argument("--a", dest="a", type=float, help="(inner) radius")
    p.add_argument("--b", dest="b", type=float, help="outer radius (annulus)")
    p.add_argument("--L", dest="L", type=float, help="tube period")
    p.add_argument("--lambda-max", dest="lambda_max", type=float)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("gs", parents=[common], help="Grad-Shafranov and flux-free eigenvalues")
    p.add_argument("--section", choices=("disk", "rectangle", "mask"))
    p.add_argument("--R", dest="disk_R", type=float, help="disk centre radius")
    p.add_argument("--a", dest="disk_a", type=float, help="disk radius")
    p.add_argument("--r-lo", dest="r_lo", type=float)
    p.add_argument("--r-hi", dest="r_hi", type=float)
    p.add_argument("--z-lo", dest="z_lo", type=float)
    p.add_argument("--z-hi", dest="z_hi", type=float)
    p.add_argument("--mask-file", dest="mask_file")
    p.add_argument("--richardson", action="store_true", default=None,
                   help="also solve on h/2 and h/4 and report the observed order")
    p.set_defaults(func=cmd_gs)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        cfg = run_config(opts)
        return args.func(opts, cfg)
    except UsageError as exc:
        _err(f"curlspec: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
