"""Command-line interface.

Exit codes: 0 success or positive verdict, 10 inconclusive verdict, 2 parse or
config error, 3 domain error, 4 a computed result contradicting a published
constant.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import constants as C
from .errors import BadConfig, DomainError
from .family_ode import (
    DEFAULT_ALPHA_START,
    DEFAULT_SLACK,
    MODEL_BOUNDS,
    TWO_PI,
    drilling_certificate,
    init_family,
    integrate_to,
    volume_change_bounds,
)
from .flat_torus import Slope, reduce_shape, shape_from_modulus, shape_from_record
from .flat_torus import extremal_length, normalized_length
from .harmonic_bounds import b00_upper, bmm, error_interval, l2_upper
from .slope_census import (
    CertifyConfig,
    GridConfig,
    box_scan_count,
    certify_fill,
    count_excluded,
    hds_region,
    max_excluded_over_moduli,
)
from .tube import RadiusFloor, tube_boundary

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_DISCREPANCY = 4
EXIT_INCONCLUSIVE = 10

CONFIG_ENV = "DRILLGAUGE_CONFIG"
DECIMALS = 12


class ParseError(Exception):
    pass


@dataclass
class RunConfig:
    constants_version: str = C.CONSTANTS_VERSION
    alpha_start: float = DEFAULT_ALPHA_START
    dalpha_max: float = 0.01
    rel_slack: float = 0.0
    floor: dict = field(default_factory=dict)
    output_format: str = "json"

    def __post_init__(self):
        if self.constants_version != C.CONSTANTS_VERSION:
            raise BadConfig(f"unsupported constants_version {self.constants_version!r}")
        for key in ("alpha_start", "dalpha_max"):
            if not float(getattr(self, key)) > 0:
                raise BadConfig(f"{key} must be positive")
        if not 0 <= self.rel_slack < 1:
            raise BadConfig("rel_slack must lie in [0, 1)")
        if self.output_format not in ("json", "csv", "table"):
            raise BadConfig(f"unknown output format {self.output_format!r}")
        self.radius_floor()

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise BadConfig(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def radius_floor(self) -> RadiusFloor:
        return RadiusFloor.from_json(self.floor) if self.floor else RadiusFloor()


def load_config(path=None) -> RunConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BadConfig(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise BadConfig("config file must hold a JSON object")
    return RunConfig.from_dict(data)


# -- formatting ---------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return f"{x:.{DECIMALS}f}"


def _prepare(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return f"\x00{_fmt_float(obj)}\x00" if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    return str(obj)


def to_json(record) -> str:
    text = json.dumps(_prepare(record), sort_keys=True, indent=2)
    return re.sub(r'"\\u0000(.*?)\\u0000"', r"\1", text)


def _flatten(record, prefix=""):
    out = {}
    for k, v in record.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = " ".join(_fmt_float(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, float):
            out[key] = _fmt_float(v)
        else:
            out[key] = "" if v is None else str(v)
    return out


def render(record: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(record) + "\n"
    flat = _flatten(record)
    if fmt == "csv":
        keys = sorted(flat)
        return ",".join(keys) + "\n" + ",".join(flat[k] for k in keys) + "\n"
    width = max((len(k) for k in flat), default=0)
    return "".join(f"{k:<{width}}  {flat[k]}\n" for k in sorted(flat))


def emit(text: str, output=None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# -- argument parsing ---------------------------------------------------------

def parse_int_pair(tokens, name):
    parts = [p for tok in tokens for p in re.split(r"[,\s]+", tok.strip()) if p]
    if len(parts) != 2:
        raise ParseError(f"{name}: expected two integers, got {' '.join(tokens)!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"{name}: expected two integers, got {' '.join(tokens)!r}") from None


def parse_float_list(tokens, name, n):
    parts = [p for tok in tokens for p in re.split(r"[,\s]+", tok.strip()) if p]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ParseError(f"{name}: expected {n} numbers, got {' '.join(tokens)!r}") from None
    if len(vals) != n:
        raise ParseError(f"{name}: expected {n} numbers, got {len(vals)}")
    return vals


def shape_from_args(args):
    if args.shape_file:
        try:
            record = json.loads(Path(args.shape_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"--shape-file: {exc}") from exc
        return _shape_from_record(record)
    if args.basis:
        e = parse_float_list(args.basis, "--basis", 4)
        return reduce_shape([e[:2], e[2:]], name="basis")
    if args.modulus:
        x, y = parse_float_list(args.modulus, "--modulus", 2)
        return shape_from_modulus(x, y, name="modulus")
    raise ParseError("one of --modulus, --basis, --shape-file is required")


def _shape_from_record(record):
    if not isinstance(record, dict):
        raise ParseError("shape record must be a JSON object")
    try:
        return shape_from_record(record)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise ParseError(f"shape record: {exc}") from exc


def _add_shape_args(p):
    g = p.add_argument_group("cusp shape")
    g.add_argument("--modulus", nargs="+", metavar="X Y", help="modulus x y of the lattice <1, x+iy>")
    g.add_argument("--basis", nargs="+", metavar="E", help="raw basis e11 e12 e21 e22")
    g.add_argument("--shape-file", help='JSON {"name", "basis"} or {"name", "modulus"}')


def _add_common(p):
    p.add_argument("--output", help="write the result here instead of stdout")
    p.add_argument("--format", choices=("json", "csv", "table"), default=None)
    p.add_argument("--config", help=f"run config JSON (default: ${CONFIG_ENV})")


def _add_floor_args(p):
    p.add_argument("--floor-file", help='radius floor table JSON {"validity_cap", "table"}')
    p.add_argument("--alpha-start", type=float)
    p.add_argument("--dalpha-max", type=float)
    p.add_argument("--rel-slack", type=float)


def _floor(args, cfg):
    if getattr(args, "floor_file", None):
        try:
            return RadiusFloor.load(args.floor_file)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"--floor-file: {exc}") from exc
    return cfg.radius_floor()


def _opt(args, cfg, name):
    val = getattr(args, name, None)
    return getattr(cfg, name) if val is None else val


# -- commands -----------------------------------------------------------------

def cmd_slope_length(args, cfg):
    shape = shape_from_args(args)
    cls = parse_int_pair(args.slope, "--slope")
    lhat = normalized_length(shape, cls)
    return {"slope": list(cls), "normalized_length": lhat,
            "extremal_length": extremal_length(shape, cls)}, EXIT_OK


def cmd_count_excluded(args, cfg):
    shape = shape_from_args(args)
    n = count_excluded(shape, args.bound)
    rec = {"bound": args.bound, "count": n, "modulus": list(shape.modulus)}
    code = EXIT_OK
    if args.verify:
        ref = box_scan_count(shape.x, shape.y, args.bound)
        rec["box_scan_count"] = ref
        if ref != n:
            code = EXIT_DISCREPANCY
    return rec, code


def _published_limit(bound):
    if bound <= C.FILL_THRESHOLD:
        return C.SINGLE_CUSP_EXCLUSIONS
    if bound <= C.MULTI_CUSP_THRESHOLD:
        return C.MULTI_CUSP_EXCLUSIONS
    return None


def cmd_moduli_max(args, cfg):
    grid = GridConfig(nx=args.nx, ny=args.ny, refinement_rounds=args.rounds, verify=args.verify)
    res = max_excluded_over_moduli(args.bound, grid)
    limit = _published_limit(args.bound)
    rec = {
        "bound": args.bound,
        "max_count": res.max_count,
        "argmax_modulus": list(res.argmax_modulus),
        "samples_evaluated": res.samples_evaluated,
        "refinement_depth": res.refinement_depth,
        "cap_count": res.cap_count,
        "published_limit": limit,
        "oracle_mismatches": len(res.mismatches),
    }
    bad = res.mismatches or (limit is not None and res.max_count > limit) or res.cap_count > 1
    return rec, EXIT_DISCREPANCY if bad else EXIT_OK


def _certify_config(args, cfg):
    return CertifyConfig(
        multi_cusp=args.multi_cusp,
        integrate=args.integrate,
        alpha_start=_opt(args, cfg, "alpha_start"),
        dalpha_max=_opt(args, cfg, "dalpha_max"),
        rel_slack=_opt(args, cfg, "rel_slack"),
        floor=_floor(args, cfg),
    )


def _certify_line(line, config):
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        return {"error": f"parse: {exc}"}, EXIT_PARSE
    try:
        shape = _shape_from_record(record)
        if "slope" in record:
            cls = Slope(*record["slope"])
        elif "class" in record:
            cls = tuple(float(v) for v in record["class"])
        else:
            raise ParseError("record needs a 'slope' or 'class' entry")
        cert = certify_fill(shape, cls, config)
    except ParseError as exc:
        return {"error": f"parse: {exc}"}, EXIT_PARSE
    except (DomainError, TypeError, ValueError) as exc:
        return {"error": f"domain: {exc}"}, EXIT_DOMAIN
    return cert.to_json(), EXIT_OK if cert.verdict.positive else EXIT_INCONCLUSIVE


def cmd_certify(args, cfg):
    config = _certify_config(args, cfg)
    if args.batch:
        try:
            lines = [ln for ln in Path(args.batch).read_text().splitlines() if ln.strip()]
        except OSError as exc:
            raise ParseError(f"--batch: {exc}") from exc
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda ln: _certify_line(ln, config), lines))
        text = "".join(json.dumps(_unprepare(rec), sort_keys=True) + "\n" for rec, _ in results)
        codes = {code for _, code in results}
        code = max(codes - {EXIT_OK, EXIT_INCONCLUSIVE}, default=EXIT_OK)
        return text, code
    shape = shape_from_args(args)
    if args.slope:
        cls = Slope(*parse_int_pair(args.slope, "--slope"))
    elif args.cls:
        cls = tuple(parse_float_list(args.cls, "--class", 2))
    else:
        raise ParseError("--slope or --class is required")
    cert = certify_fill(shape, cls, config)
    return cert.to_json(), EXIT_OK if cert.verdict.positive else EXIT_INCONCLUSIVE


def _unprepare(rec):
    """Round floats for JSON-lines output without the fixed-width rewrite."""
    if isinstance(rec, float):
        return round(rec, DECIMALS) if math.isfinite(rec) else None
    if isinstance(rec, dict):
        return {k: _unprepare(v) for k, v in rec.items()}
    if isinstance(rec, list):
        return [_unprepare(v) for v in rec]
    return rec


def cmd_integrate(args, cfg):
    alpha_start = _opt(args, cfg, "alpha_start")
    state = init_family(args.lhat, alpha_start, _opt(args, cfg, "rel_slack"),
                        None if args.model else _floor(args, cfg))
    if args.model:
        trace = integrate_to(state, args.alpha_target, _opt(args, cfg, "dalpha_max"),
                             error_bounds=MODEL_BOUNDS, slack=args.slack)
    else:
        trace = integrate_to(state, args.alpha_target, _opt(args, cfg, "dalpha_max"),
                             _floor(args, cfg), slack=args.slack)
    if args.trace_csv:
        Path(args.trace_csv).write_text(trace.to_csv())
    vol = volume_change_bounds(trace, args.lhat)
    rec = {"lhat": args.lhat, "model": args.model, "alpha_start": alpha_start,
           "final": trace.summary(), "dv_lo": vol.dv_lo, "dv_hi": vol.dv_hi,
           "nz_reference": vol.nz_reference}
    return rec, EXIT_OK


def cmd_drill(args, cfg):
    cert = drilling_certificate(args.geodesic, args.cusped_volume)
    return cert.to_json(), EXIT_OK if cert.verdict.positive else EXIT_INCONCLUSIVE


def cmd_hds_region(args, cfg):
    shape = shape_from_args(args)
    region = hds_region(shape, args.threshold)
    rec = region.to_json()
    rec["semi_axes"] = list(region.semi_axes)
    if args.cls:
        c = parse_float_list(args.cls, "--class", 2)
        rec["class"] = c
        rec["in_region"] = region.contains(c)
    return rec, EXIT_OK


def cmd_bounds(args, cfg):
    a, l, R = args.alpha, args.ell, args.radius
    e = error_interval(R)
    tb = tube_boundary(a, l, R)
    return {
        "alpha": a, "ell": l, "radius": R,
        "e_lo": e.e_lo, "e_hi": e.e_hi,
        "meridian": tb.meridian, "area": tb.area, "kappa": tb.kappa,
        "bmm": bmm(a, l, R), "b00_upper": b00_upper(a, l, R), "l2_upper": l2_upper(a, l, R).bound,
    }, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drillgauge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("slope-length", help="normalized and extremal length of a class")
    _add_shape_args(p)
    p.add_argument("--slope", nargs="+", required=True, metavar="P Q")
    _add_common(p)
    p.set_defaults(func=cmd_slope_length)

    p = sub.add_parser("count-excluded", help="number of slopes shorter than a bound")
    _add_shape_args(p)
    p.add_argument("--bound", type=float, default=C.FILL_THRESHOLD)
    p.add_argument("--verify", action="store_true", help="cross-check with a box scan")
    _add_common(p)
    p.set_defaults(func=cmd_count_excluded)

    p = sub.add_parser("moduli-max", help="maximize the excluded count over moduli space")
    p.add_argument("--bound", type=float, default=C.FILL_THRESHOLD)
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--ny", type=int, default=100)
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--verify", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_moduli_max)

    p = sub.add_parser("certify", help="certify hyperbolicity of a filling")
    _add_shape_args(p)
    p.add_argument("--slope", nargs="+", metavar="P Q")
    p.add_argument("--class", dest="cls", nargs="+", metavar="X Y")
    p.add_argument("--multi-cusp", action="store_true")
    p.add_argument("--integrate", action="store_true", help="attach a cone-family enclosure")
    p.add_argument("--batch", help="JSON-lines file of shape records with 'slope' or 'class'")
    _add_floor_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("integrate", help="integrate the cone-angle family envelopes")
    p.add_argument("--lhat", type=float, required=True)
    p.add_argument("--alpha-target", type=float, default=TWO_PI)
    p.add_argument("--model", action="store_true", help="E = 0 model deformation")
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    p.add_argument("--trace-csv", help="write the full trace as CSV")
    _add_floor_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("drill", help="volume bound from a short geodesic")
    p.add_argument("--geodesic", type=float, required=True)
    p.add_argument("--cusped-volume", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_drill)

    p = sub.add_parser("hds-region", help="excluded ellipse of the Dehn surgery space region")
    _add_shape_args(p)
    p.add_argument("--threshold", type=float, default=C.HDS_THRESHOLD)
    p.add_argument("--class", dest="cls", nargs="+", metavar="X Y")
    _add_common(p)
    p.set_defaults(func=cmd_hds_region)

    p = sub.add_parser("bounds", help="boundary-term bounds at (alpha, ell, R)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--radius", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        fmt = args.format or cfg.output_format
        result, code = args.func(args, cfg)
    except (ParseError, BadConfig) as exc:
        print(f"drillgauge: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"drillgauge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    emit(result if isinstance(result, str) else render(result, fmt), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
