"""Command-line front end: ``indefspec {spectrum,modes,trace,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 solver error.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import fields
import datetime as _dt
import io
import json
import math
import os
import sys

from . import __version__
from .errors import DeltaOutOfRange, IndefSpecError
from .modes import eigenfunction_distance, mode_spec, sample_grid
from .numerics import SolverConfig
from .spectrum import (
    MAX_DELTA,
    ModeIndex,
    continue_to_delta,
    solve_mode,
    solve_unperturbed,
)

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(Exception):
    pass


class SolverFailure(Exception):
    def __init__(self, n, m, cause):
        self.n, self.m, self.cause = n, m, cause
        super().__init__(f"solver failed for (n={n}, m={m}): {cause}")


# --- serialisation -----------------------------------------------------------

def _num(x):
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0):
    """Deterministic JSON: key order as given, floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, complex):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    return _num(obj)


def timestamp():
    # SOURCE_DATE_EPOCH pins the manifest time for reproducible output
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        t = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        t = _dt.datetime.now(tz=_dt.timezone.utc).replace(microsecond=0)
    return t.isoformat().replace("+00:00", "Z")


def manifest(command, config, extra=None):
    m = {
        "command": command,
        "config": config.as_dict(),
        "tool_version": __version__,
        "timestamp": timestamp(),
    }
    if extra:
        m.update(extra)
    return m


def _write_text(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(payload_manifest, key, records, header, rows, fmt, out):
    if fmt == "json":
        _write_text(dumps({"manifest": payload_manifest, key: records}) + "\n", out)
    else:
        _write_text(_csv_text(header, rows), out)
        if out not in (None, "-"):
            _write_text(dumps(payload_manifest) + "\n", out + ".manifest.json")


# --- config handling ---------------------------------------------------------

_CONFIG_KEYS = {f.name for f in fields(SolverConfig)}


def read_config_file(path):
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def build_config(values):
    kwargs = {}
    for key in _CONFIG_KEYS & values.keys():
        raw = values[key]
        if key == "fd_grid_sizes":
            kwargs[key] = tuple(int(s) for s in str(raw).split(",") if s.strip())
        elif key == "continuation_steps":
            kwargs[key] = int(raw)
        else:
            kwargs[key] = float(raw)
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _delta(args):
    d = complex(args.delta_re, args.delta_im)
    if abs(d) > MAX_DELTA:
        raise DeltaOutOfRange(f"|delta| = {abs(d):.6g} exceeds {MAX_DELTA}")
    return d


def _threads():
    raw = os.environ.get("INDEFSPEC_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"INDEFSPEC_THREADS must be an integer, got {raw!r}") from None
    return n if n > 0 else (os.cpu_count() or 1)


# --- commands ----------------------------------------------------------------

def _record_dict(e):
    return {
        "n": e.index.n,
        "m": e.index.m,
        "delta": {"re": e.delta.real, "im": e.delta.imag},
        "lambda": {"re": e.value.real, "im": e.value.imag},
        "residual": e.residual,
        "source": e.source.value,
    }


def cmd_spectrum(args, config):
    if args.n_max < 1 or args.m_max < 0:
        raise UsageError("--n-max must be >= 1 and --m-max >= 0")
    delta = _delta(args)

    def solve(n):
        try:
            base = solve_unperturbed(n, args.m_max, config)
        except IndefSpecError as exc:
            raise SolverFailure(n, f"0..{args.m_max}", exc) from exc
        if delta == 0:
            return base
        out = []
        for e in base:
            try:
                out.append(continue_to_delta(e, delta, config=config))
            except IndefSpecError as exc:
                raise SolverFailure(n, e.index.m, exc) from exc
        return out

    with ThreadPoolExecutor(max_workers=min(_threads(), args.n_max)) as pool:
        per_n = list(pool.map(solve, range(1, args.n_max + 1)))
    records = sorted((e for group in per_n for e in group), key=lambda e: (e.index.n, e.index.m))
    header = ["n", "m", "delta_re", "delta_im", "lambda_re", "lambda_im", "residual", "source"]
    rows = [[e.index.n, e.index.m, e.delta.real, e.delta.imag, e.value.real, e.value.imag,
             e.residual, e.source.value] for e in records]
    _emit(manifest("spectrum", config, {"argv": _argv(args)}), "records",
          [_record_dict(e) for e in records], header, rows, args.format, args.out)
    return EXIT_OK


def cmd_modes(args, config):
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    delta = _delta(args)
    index = ModeIndex(args.n, args.m)
    try:
        eig = solve_mode(index, config)
        if delta != 0:
            eig = continue_to_delta(eig, delta, config=config)
        spec = mode_spec(eig, config)
    except IndefSpecError as exc:
        raise SolverFailure(args.n, args.m, exc) from exc
    X, Y, F = sample_grid(spec, args.grid)
    rows = [[float(x), float(y), float(f.real), float(f.imag)]
            for x, y, f in zip(X.ravel(), Y.ravel(), F.ravel())]
    info = {
        "n": args.n,
        "m": args.m,
        "delta": {"re": delta.real, "im": delta.imag},
        "lambda": {"re": spec.lam.real, "im": spec.lam.imag},
        "normalization": {"re": spec.normalization.real, "im": spec.normalization.imag},
        "grid": args.grid,
    }
    man = manifest("modes", config, {"argv": _argv(args), "mode": info})
    _write_text(_csv_text(["x", "y", "re", "im"], rows), args.out)
    if args.out not in (None, "-"):
        _write_text(dumps(man) + "\n", args.out + ".manifest.json")
    else:
        sys.stderr.write(dumps(info, indent=0).replace("\n", "") + "\n")
    return EXIT_OK


def _parse_float_list(text, flag):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers") from None


def parse_delta_path(args):
    """Resolve --delta-path / --eta-sequence / --epsilon-sequence to a list of deltas."""
    given = [x for x in (args.delta_path, args.eta_sequence, args.epsilon_sequence) if x is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --delta-path, --eta-sequence, --epsilon-sequence")
    if args.delta_path is not None:
        deltas = []
        for part in args.delta_path.split(";"):
            if not part.strip():
                continue
            try:
                re_, im_ = (float(s) for s in part.split(","))
            except ValueError:
                raise UsageError(f"--delta-path: bad entry {part!r}") from None
            deltas.append(complex(re_, im_))
    elif args.eta_sequence is not None:
        # lossy coefficient -1 + i eta equals -1/(1 + delta)
        deltas = [1.0 / (1.0 - 1j * eta) - 1.0 for eta in _parse_float_list(args.eta_sequence, "--eta-sequence")]
    else:
        # contrast kappa = 1 + eps, coefficient -1/kappa
        deltas = [complex(eps) for eps in _parse_float_list(args.epsilon_sequence, "--epsilon-sequence")]
    if not deltas:
        raise UsageError("empty delta path")
    for d in deltas:
        if abs(d) > MAX_DELTA:
            raise DeltaOutOfRange(f"|delta| = {abs(d):.6g} exceeds {MAX_DELTA}")
    return deltas


def cmd_trace(args, config):
    deltas = parse_delta_path(args)
    index = ModeIndex(args.n, args.m)
    try:
        seed = solve_mode(index, config)
        base = mode_spec(seed, config)
        table = []
        for d in deltas:
            e = continue_to_delta(seed, d, config=config)
            dist = eigenfunction_distance(mode_spec(e, config), base)
            table.append((d, e.value, abs(e.value - seed.value), dist))
    except IndefSpecError as exc:
        raise SolverFailure(args.n, args.m, exc) from exc
    records = [{
        "delta": {"re": d.real, "im": d.imag},
        "lambda_delta": {"re": lam.real, "im": lam.imag},
        "error": err,
        "psi_sup_distance": dist,
    } for d, lam, err, dist in table]
    header = ["delta_re", "delta_im", "lambda_re", "lambda_im", "error", "psi_sup_distance"]
    rows = [[d.real, d.imag, lam.real, lam.imag, err, dist] for d, lam, err, dist in table]
    extra = {"argv": _argv(args), "lambda_0": {"re": seed.value.real, "im": seed.value.imag}}
    _emit(manifest("trace", config, extra), "records", records, header, rows, args.format, args.out)
    return EXIT_OK


def cmd_validate(args, config):
    from .validation import run_suite

    results = run_suite(args.level, config)
    for r in results:
        print(r.line())
    checks = [{
        "name": r.name,
        "passed": bool(r.passed),
        "measured": _jsonable(r.measured),
        "threshold": _jsonable(r.threshold),
        "detail": r.detail,
        "seconds": round(r.seconds, 3),
    } for r in results]
    passed = all(r.passed for r in results)
    report = {
        "manifest": manifest("validate", config, {"level": args.level}),
        "passed": passed,
        "checks": checks,
    }
    if args.out:
        _write_text(dumps(report) + "\n", args.out)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if passed else EXIT_VALIDATION


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    if hasattr(v, "item"):
        return v.item()
    return str(v)


def _argv(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}


# --- parser ------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="indefspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--out", help="output path (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="json")

    def delta_flags(p):
        p.add_argument("--delta-re", type=float, default=0.0)
        p.add_argument("--delta-im", type=float, default=0.0)

    p = sub.add_parser("spectrum", help="eigenvalues sorted by (n, m)")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--m-max", type=int, default=5)
    delta_flags(p)
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("modes", help="sample one eigenfunction on a K x K grid (CSV)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--grid", type=int, default=201)
    delta_flags(p)
    common(p, fmt=False)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("trace", help="eigenvalue convergence along a delta path")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta-path", help='"re,im;re,im;..."')
    p.add_argument("--eta-sequence", help="lossy family: coefficient -1 + i*eta")
    p.add_argument("--epsilon-sequence", help="contrast family: kappa = 1 + eps")
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("validate", help="run the invariant and oracle suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre, _ = parser.parse_known_args(argv)
        file_values = read_config_file(pre.config) if getattr(pre, "config", None) else {}
        # non-solver keys in the file become defaults for the subcommand flags
        sub_defaults = {k: v for k, v in file_values.items() if k not in _CONFIG_KEYS}
        if sub_defaults:
            subparser = parser._subparsers._group_actions[0].choices[pre.command]
            known = {a.dest: a for a in subparser._actions}
            for key, raw in sub_defaults.items():
                if key not in known:
                    raise UsageError(f"unknown config key {key!r}")
                action = known[key]
                subparser.set_defaults(**{key: action.type(raw) if action.type else raw})
        args = parser.parse_args(argv)
        config = build_config(file_values)
        return args.func(args, config)
    except (UsageError, DeltaOutOfRange, OSError) as exc:
        print(f"indefspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverFailure as exc:
        print(f"indefspec: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except IndefSpecError as exc:
        print(f"indefspec: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
