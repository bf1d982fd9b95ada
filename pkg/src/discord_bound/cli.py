"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input or usage error.
Machine output goes to stdout (or ``--out``); progress and summaries go to
stderr.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import io
import json
import sys

import numpy as np

from discord_bound import fileio, states
from discord_bound.correlations import DEFAULT_RESTARTS, quantum_discord
from discord_bound.dilation import CONSTRUCTIONS, DEFAULT_DIM_CAP, build_proof_trace, trace_to_dict, verify_proof
from discord_bound.errors import ValidationError
from discord_bound import measurement as meas

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

PRESETS = ("bell", "bell_phi_plus", "werner", "maximally_mixed", "classical_classical", "ginibre", "haar_pure")
POVM_GENERATORS = ("computational", "trine", "random", "random-rank1", "random-projective")
SCAN_ENSEMBLES = ("ginibre", "haar_pure", "werner-sweep")
CSV_COLUMNS = (
    "index", "seed", "dims", "s_a", "s_b", "s_ab", "mi", "j", "discord",
    "bound_margin", "discord_sb_margin", "d_minus_sa_sign",
)
BOUND_TOL = 1e-9
SIGN_TOL = 1e-9


class InputError(Exception):
    pass


def parse_dims(text):
    try:
        dims = tuple(int(p) for p in str(text).lower().split("x"))
    except ValueError:
        raise InputError(f"invalid dims {text!r}; expected e.g. 2x3") from None
    if len(dims) != 2 or min(dims) < 1:
        raise InputError(f"invalid dims {text!r}; expected two positive integers like 2x3")
    return dims


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _log(msg):
    print(msg, file=sys.stderr)


def make_state(name, param=None, dims=None, seed=0, rank=None, table=None):
    if name in ("bell", "bell_phi_plus"):
        return states.family("bell_phi_plus")
    if name == "werner":
        return states.family("werner", param)
    if name == "maximally_mixed":
        return states.maximally_mixed(dims or (2, 2))
    if name == "classical_classical":
        if table is None:
            raise InputError("classical_classical needs --table (JSON nested list)")
        try:
            tab = json.loads(table)
        except json.JSONDecodeError:
            raise InputError("--table must be a JSON nested list") from None
        return states.family("classical_classical", tab)
    if name == "ginibre":
        d = dims or (2, 2)
        return states.random_mixed_ginibre(d, rank or d[0] * d[1], seed)
    if name == "haar_pure":
        return states.random_pure_haar(dims or (2, 2), seed)
    raise InputError(f"unknown preset/family {name!r}; known: {', '.join(PRESETS)}")


def _state_from_args(args):
    if args.state:
        return states.load_state(_read(args.state))
    if not args.preset:
        raise InputError("give --preset or --state")
    dims = parse_dims(args.dims) if args.dims else None
    return make_state(args.preset, args.param, dims, args.state_seed, args.rank, args.table)


def _povm_from_args(args, dim_b):
    spec = args.povm
    if spec == "computational":
        return meas.computational(dim_b)
    if spec == "trine":
        if dim_b != 2:
            raise InputError("the trine POVM acts on a qubit")
        return meas.trine()
    if spec == "random":
        return meas.random_povm(dim_b, args.outcomes, args.povm_seed)
    if spec == "random-rank1":
        return meas.random_rank1_povm(dim_b, args.outcomes, args.povm_seed)
    if spec == "random-projective":
        return meas.random_projective(dim_b, args.povm_seed)
    return meas.load_povm(_read(spec))


def format_human(d, digits=12, indent=0):
    lines = []
    pad = "  " * indent
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(format_human(v, digits, indent + 1).splitlines())
        elif isinstance(v, (float, np.floating)):
            lines.append(f"{pad}{k}: {float(v):.{digits}g}")
        elif isinstance(v, list) and v and isinstance(v[0], (float, np.floating)):
            lines.append(f"{pad}{k}: [" + ", ".join(f"{float(x):.{digits}g}" for x in v) + "]")
        else:
            lines.append(f"{pad}{k}: {v}")
    return "\n".join(lines) + "\n"


def cmd_compute(args):
    rho = _state_from_args(args)
    rep = quantum_discord(rho, args.measurement_class, args.restarts, args.seed)
    doc = {"schema_version": fileio.SCHEMA_VERSION, "kind": "correlation_report"}
    doc.update(rep.to_dict())
    text = fileio.dumps(doc) if args.format == "json" else format_human(doc)
    _emit(text, args.out)
    return EXIT_OK


def scan_member(ensemble, index, seed, dims, count, rank, restarts, measurement_class):
    """One scan row; ``seed`` is already the per-member seed."""
    if ensemble == "ginibre":
        rho = states.random_mixed_ginibre(dims, rank or dims[0] * dims[1], seed)
    elif ensemble == "haar_pure":
        rho = states.random_pure_haar(dims, seed)
    else:
        z = index / (count - 1) if count > 1 else 0.0
        rho = states.werner(z)
    rep = quantum_discord(rho, measurement_class, restarts, seed)
    diff = rep.discord - rep.s_a
    sign = 0 if abs(diff) <= SIGN_TOL else (1 if diff > 0 else -1)
    return {
        "index": index,
        "seed": seed,
        "dims": "x".join(str(d) for d in rho.dims),
        "s_a": rep.s_a,
        "s_b": rep.s_b,
        "s_ab": rep.s_ab,
        "mi": rep.mutual_information,
        "j": rep.classical_j,
        "discord": rep.discord,
        "bound_margin": rep.bound_margin,
        "discord_sb_margin": rep.discord_sb_margin,
        "d_minus_sa_sign": sign,
    }


def _scan_member_star(job):
    return scan_member(*job)


def run_scan(ensemble, count, dims=(2, 2), seed=0, rank=None, restarts=8, measurement_class="projective", workers=1):
    """Scan rows in index order; per-member seed is ``seed XOR index``."""
    if ensemble not in SCAN_ENSEMBLES:
        raise InputError(f"unknown ensemble {ensemble!r}")
    if ensemble == "werner-sweep":
        dims = (2, 2)
    jobs = [(ensemble, i, seed ^ i, dims, count, rank, restarts, measurement_class) for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_member_star, jobs))
    return [_scan_member_star(j) for j in jobs]


def rows_to_csv(rows):
    buf = io.StringIO()
    buf.write(f"# schema_version: {fileio.SCHEMA_VERSION}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        cells = []
        for c in CSV_COLUMNS:
            v = row[c]
            cells.append(fileio.format_float(v) if isinstance(v, float) else str(v))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def read_scan_csv(text):
    """Parse scan output; rejects unknown schema majors."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# schema_version:"):
        raise ValidationError("schema", "scan file lacks a schema_version line")
    fileio.check_schema({"schema_version": lines[0].split(":", 1)[1].strip()}, "scan")
    header = lines[1].split(",")
    rows = []
    for line in lines[2:]:
        cells = line.split(",")
        row = {}
        for k, v in zip(header, cells):
            row[k] = v if k == "dims" else (int(v) if k in ("index", "seed", "d_minus_sa_sign") else float(v))
        rows.append(row)
    return rows


def scan_summary(rows):
    bm = [r["bound_margin"] for r in rows]
    dm = [r["discord_sb_margin"] for r in rows]
    return {
        "rows": len(rows),
        "min_bound_margin": min(bm) if bm else float("nan"),
        "min_discord_sb_margin": min(dm) if dm else float("nan"),
        "violations": sum(1 for v in bm if v < -BOUND_TOL),
    }


def cmd_scan(args):
    dims = parse_dims(args.dims)
    if args.count < 1:
        raise InputError("--count must be positive")
    rows = run_scan(args.ensemble, args.count, dims, args.seed, args.rank, args.restarts,
                    args.measurement_class, args.workers)
    _emit(rows_to_csv(rows), args.out)
    s = scan_summary(rows)
    _log(
        f"rows={s['rows']} min_bound_margin={s['min_bound_margin']:.12g} "
        f"min_discord_sb_margin={s['min_discord_sb_margin']:.12g} violations={s['violations']}"
    )
    return EXIT_OK


def cmd_verify_proof(args):
    rho = _state_from_args(args)
    povm = _povm_from_args(args, rho.dim_b)
    trace = build_proof_trace(rho, povm, args.construction, dim_cap=args.dim_cap)
    verdict = verify_proof(trace)
    doc = {"schema_version": fileio.SCHEMA_VERSION, "kind": "proof_trace"}
    doc.update(trace_to_dict(trace, verdict, full=args.full))
    text = fileio.dumps(doc) if args.format == "json" else format_human(doc)
    _emit(text, args.out)
    for c in verdict.checks:
        status = "pass" if c.passed else ("FAIL" if c.required else "info")
        _log(f"{status:4s} {c.name} residual={c.residual:.3e}")
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_state_gen(args):
    dims = parse_dims(args.dims) if args.dims else None
    rho = make_state(args.family, args.param, dims, args.seed, args.rank, args.table)
    _emit(states.dump_state(rho), args.out)
    return EXIT_OK


def _add_state_source(p):
    p.add_argument("--preset", help=f"named state: {', '.join(PRESETS)}")
    p.add_argument("--state", help="state file (JSON)")
    p.add_argument("--param", type=float, help="family parameter (werner weight)")
    p.add_argument("--dims", help="dimensions like 2x3 (random presets)")
    p.add_argument("--rank", type=int, help="Ginibre rank (default: full)")
    p.add_argument("--table", help="joint probability table for classical_classical, JSON")
    p.add_argument("--state-seed", type=int, default=0, help="seed for random presets")


def build_parser():
    parser = argparse.ArgumentParser(prog="discord-bound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="correlation report for one state")
    _add_state_source(p)
    p.add_argument("--class", dest="measurement_class", choices=("projective", "povm"), default="projective")
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("scan", help="ensemble scan as CSV")
    p.add_argument("--ensemble", choices=SCAN_ENSEMBLES, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--dims", default="2x2")
    p.add_argument("--rank", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--class", dest="measurement_class", choices=("projective", "povm"), default="projective")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify-proof", help="audit the dilation chain for one state and POVM")
    _add_state_source(p)
    p.add_argument("--povm", default="computational",
                   help=f"POVM file or generator: {', '.join(POVM_GENERATORS)}")
    p.add_argument("--outcomes", type=int, default=2, help="outcomes for random POVMs")
    p.add_argument("--povm-seed", type=int, default=0)
    p.add_argument("--construction", choices=CONSTRUCTIONS, default="rank1")
    p.add_argument("--dim-cap", type=int, default=DEFAULT_DIM_CAP)
    p.add_argument("--full", action="store_true", help="include matrices in the report")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_proof)

    p = sub.add_parser("state", help="state files")
    ssub = p.add_subparsers(dest="state_command", required=True)
    g = ssub.add_parser("gen", help="write a state file")
    g.add_argument("--family", required=True)
    g.add_argument("--param", type=float)
    g.add_argument("--dims")
    g.add_argument("--rank", type=int)
    g.add_argument("--table")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_state_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _log(f"error: invalid input: {exc}")
        return EXIT_INPUT
    except InputError as exc:
        _log(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
