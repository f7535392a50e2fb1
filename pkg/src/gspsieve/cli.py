"""Command-line entry point: ``gspsieve <command> [options]``.

Every command prints one deterministic document. Exit codes: 0 success,
1 usage error, 2 budget or cap exceeded, 3 mathematical precondition failure
(including a failed verification check).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import random
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import __version__, curves, grouplab
from .certify import certify_surface
from .curves import HyperellipticCurve, weil_polynomial
from .errors import BudgetError, GspSieveError, PreconditionError
from .galois import cycle_type_witnesses, exceptional_prime_norm, quartic_galois_group, weil_galois_is_D4
from .sieve import SieveParams, density_scan, equidistribution_sample, large_sieve_L, sieve_bound
from .symplectic import commutator_span, group_commutator_congruence, group_order, lie_dimension

log = logging.getLogger("gspsieve")

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    seed: int = 0
    C: int = 3
    c0: float = 1.0
    d0: float = 0.0
    closure_cap: int = grouplab.DEFAULT_CAP
    prime_limit: int = 200
    field_size: int = curves.MAX_FIELD
    lifting_trials: int = 50
    formula_samples: int = 1000
    format: str = "json"

    def validate(self) -> None:
        for name in ("closure_cap", "prime_limit", "field_size", "lifting_trials", "formula_samples"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.c0 < 0:
            raise UsageError("c0 must be nonnegative")

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            out[key.strip()] = value.strip()
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    raw = read_config_file(args.config) if args.config else {}
    for key, value in raw.items():
        if key not in types:
            raise UsageError(f"unknown config key {key!r}")
        conv = {"int": int, "float": float, "str": str}[types[key]]
        try:
            setattr(cfg, key, conv(value))
        except ValueError as exc:
            raise UsageError(f"config {key}: {exc}") from None
    for key in ("seed", "format"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output

def _encode(obj: Any) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def envelope(command: str, cfg: RunConfig, result: Any) -> dict:
    return {
        "command": command,
        "seed": cfg.seed,
        "config_hash": cfg.digest(),
        "tool_version": __version__,
        "result": result,
    }


def emit(doc: dict, cfg: RunConfig, rows: list[dict] | None = None, out=None) -> None:
    out = out or sys.stdout
    if cfg.format == "csv":
        if rows is None:
            rows = [_flatten(doc)]
        buf = io.StringIO()
        header = list(rows[0].keys()) if rows else []
        w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})
        out.write(buf.getvalue())
    else:
        out.write(_encode(doc) + "\n")


def _cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return " ".join(map(str, v))
    return v


def _flatten(doc: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(_flatten(v, key + "."))
        else:
            flat[key] = v
    return flat


def read_curves(path: str) -> list[HyperellipticCurve]:
    with open(path) as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    try:
        return [HyperellipticCurve.from_line(ln) for ln in lines if ln]
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# group verification battery

def _check_orders(cfg: RunConfig) -> dict:
    got = {}
    for g, ell in ((1, 2), (1, 3), (1, 5), (2, 2)):
        n = grouplab.sp_group(g, ell, cap=cfg.closure_cap).order
        got[f"Sp{2 * g}(F{ell})"] = n
        if n != group_order(g, ell):
            return {"passed": False, "detail": got}
    return {"passed": True, "detail": got}


def _check_stopdrop(cfg: RunConfig) -> dict:
    detail = {}
    ok = True
    for g in (1, 2):
        for ell in (3, 5, 7):
            dim = commutator_span(g, ell).dimension
            detail[f"g={g},l={ell}"] = dim
            ok &= dim == lie_dimension(g)
        twice = commutator_span(g, 4).contains_twice_sp
        detail[f"g={g},mod4_contains_2sp"] = twice
        ok &= bool(twice)
    return {"passed": ok, "detail": detail}


def _check_formula(cfg: RunConfig) -> dict:
    rng = random.Random(cfg.seed)
    bad = 0
    for _ in range(cfg.formula_samples):
        ell = rng.choice([3, 5, 7])
        g = rng.choice([1, 2])
        m = rng.randint(1, 3)
        n = rng.randint(1, m)
        U = [[rng.randrange(-ell**3, ell**3) for _ in range(2 * g)] for _ in range(2 * g)]
        V = [[rng.randrange(-ell**3, ell**3) for _ in range(2 * g)] for _ in range(2 * g)]
        bad += not group_commutator_congruence(ell, n, m, U, V)
    return {"passed": bad == 0, "detail": {"samples": cfg.formula_samples, "failures": bad}}


def _check_goursat(cfg: RunConfig) -> dict:
    U = np.array([[1, 1], [0, 1]])
    L = np.array([[1, 0], [1, 1]])
    flat = lambda a, m: tuple(int(x) % m for x in a.ravel())  # noqa: E731
    z2 = grouplab.permutation_group([(1, 0)], cap=cfg.closure_cap)
    diag = grouplab.product_closure_test([((1, 0), (1, 0))], z2, z2, cap=cfg.closure_cap)
    detail = {"diagonal_Z2": diag.closure_order}
    ok = diag.first_surjective and diag.second_surjective and not diag.is_full_product
    for m1, m2, want in ((5, 7, 40320), (2, 3, 144)):
        G1 = grouplab.tuple_matrix_group([U, L], m1, cap=cfg.closure_cap)
        G2 = grouplab.tuple_matrix_group([U, L], m2, cap=cfg.closure_cap)
        gens = [(flat(U, m1), flat(U, m2)), (flat(L, m1), flat(L, m2))]
        rep = grouplab.product_closure_test(gens, G1, G2, cap=cfg.closure_cap)
        detail[f"SL2(F{m1})xSL2(F{m2})"] = rep.closure_order
        ok &= rep.is_full_product and rep.closure_order == want
    return {"passed": bool(ok), "detail": detail}


def _check_lifting(cfg: RunConfig) -> dict:
    detail = {}
    ok = True
    for g, ell in ((2, 2), (1, 5)):
        rep = grouplab.lifting_check(g, ell, 2, cfg.lifting_trials, cfg.seed)
        detail[f"g={g},l={ell},k=2"] = {"trials": rep.trials, "expected": rep.expected_order,
                                        "counterexample": rep.counterexample is not None}
        ok &= rep.passed
    return {"passed": ok, "detail": detail}


def _check_perfectness(cfg: RunConfig) -> dict:
    # SL2(F2) and SL2(F3) have abelianizations Z/2 and Z/3; Sp4(F3) is perfect
    expected = {(1, 2): False, (1, 3): False, (2, 3): True}
    detail = {}
    ok = True
    for (g, ell), want in expected.items():
        got = grouplab.perfectness_check(g, ell, cap=cfg.closure_cap)
        detail[f"g={g},l={ell}"] = got
        ok &= got == want
    return {"passed": ok, "detail": detail}


BATTERY: dict[str, Callable[[RunConfig], dict]] = {
    "orders": _check_orders,
    "stopdrop": _check_stopdrop,
    "commutator-formula": _check_formula,
    "goursat": _check_goursat,
    "lifting": _check_lifting,
    "perfectness": _check_perfectness,
}


# ---------------------------------------------------------------------------
# commands

def cmd_group_verify(args, cfg: RunConfig) -> int:
    names = args.only or list(BATTERY)
    for n in names:
        if n not in BATTERY:
            raise UsageError(f"unknown check {n!r}; choose from {', '.join(BATTERY)}")
    results = {}
    first_failure = None
    for n in names:
        res = BATTERY[n](cfg)
        results[n] = res
        if not res["passed"] and first_failure is None:
            first_failure = n
    doc = envelope("group-verify", cfg, {"checks": results, "all_passed": first_failure is None,
                                         "first_failure": first_failure})
    rows = [{"check": n, "passed": r["passed"]} for n, r in results.items()]
    emit(doc, cfg, rows)
    if first_failure:
        print(f"error: check {first_failure!r} failed", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def _per_curve(items, fn) -> tuple[list[dict], int]:
    """Apply fn to each curve; failures become entries and set the exit code."""
    docs, code = [], EXIT_OK
    for c in items:
        try:
            docs.append(fn(c))
        except GspSieveError as exc:
            docs.append({"curve": list(c.f_coefficients), "error": type(exc).__name__, "message": str(exc)})
            code = max(code, EXIT_BUDGET if isinstance(exc, BudgetError) else EXIT_PRECONDITION)
    if code:
        print("error: some curves failed (see their entries)", file=sys.stderr)
    return docs, code


def _rows(docs: list[dict], keys: tuple[str, ...]) -> list[dict]:
    return [{k: d.get(k, d.get("error") if k == "label" else "") for k in keys} for d in docs]


def _weil_doc(c: HyperellipticCurve, p: int) -> dict:
    w = weil_polynomial(c, p)
    return {"curve": list(c.f_coefficients), "p": p, "genus": c.genus,
            "coefficients": list(w.coefficients),
            "point_counts": [w.predicted_count(r) for r in range(1, w.g + 1)],
            "functional_equation": w.satisfies_functional_equation()}


def cmd_charpoly(args, cfg: RunConfig) -> int:
    docs, code = _per_curve(read_curves(args.curves), lambda c: _weil_doc(c, args.p))
    emit(envelope("charpoly", cfg, docs), cfg, _rows(docs, ("curve", "coefficients", "error")))
    return code


def _label_doc(lab) -> dict:
    return {"label": lab.label, "monic": list(lab.monic), "resolvent": list(lab.resolvent),
            "resolvent_rational_roots": list(lab.resolvent_roots),
            "discriminant": lab.discriminant, "discriminant_is_square": lab.disc_is_square}


def cmd_galois(args, cfg: RunConfig) -> int:
    if (args.quartic is None) == (args.curves is None):
        raise UsageError("give exactly one of --quartic or --curves")
    if args.quartic is not None:
        result = _label_doc(quartic_galois_group(parse_ints(args.quartic)))
        emit(envelope("galois", cfg, result), cfg, [{"label": result["label"]}])
        return EXIT_OK
    if args.p is None:
        raise UsageError("--curves needs --p")

    def one(c):
        w = weil_polynomial(c, args.p)
        entry = {"curve": list(c.f_coefficients), "p": args.p, "weil": list(w.coefficients)}
        is_d4, lab = weil_galois_is_D4(w)
        entry.update(is_D4=is_d4, **_label_doc(lab))
        if is_d4 and args.norm:
            nr = exceptional_prime_norm(w)
            entry["norm"] = {"value": str(nr.value), "prime_divisors": list(nr.prime_divisors),
                             "cofactor": str(nr.cofactor)}
        return entry

    docs, code = _per_curve(read_curves(args.curves), one)
    emit(envelope("galois", cfg, docs), cfg, _rows(docs, ("curve", "label")))
    return code


def cmd_certify(args, cfg: RunConfig) -> int:
    limit = args.limit or cfg.prime_limit
    docs, code = _per_curve(read_curves(args.curves),
                            lambda c: certify_surface(c, args.h_bound, limit, cfg.c0, cfg.d0).to_document())
    emit(envelope("certify", cfg, docs), cfg, _rows(docs, ("curve", "v", "label", "ln_b", "ln_threshold")))
    return code


def cmd_modulus(args, cfg: RunConfig) -> int:
    if (args.poly is None) == (args.file is None):
        raise UsageError("give exactly one of --poly or a polynomial file")
    if args.file:
        with open(args.file) as fh:
            text = " ".join(ln.split("#", 1)[0] for ln in fh)
    else:
        text = args.poly
    P = parse_ints(text)
    C = args.C if args.C is not None else cfg.C
    bound = args.bound or cfg.prime_limit
    wits, m = cycle_type_witnesses(P, C, bound)
    result = {"P": P, "C": C, "bound": bound, "modulus": m,
              "witnesses": [{"pattern": "+".join(map(str, sorted(w.pattern, reverse=True))),
                             "prime": w.prime} for w in wits]}
    emit(envelope("modulus", cfg, result), cfg, result["witnesses"])
    return EXIT_OK


def cmd_sieve(args, cfg: RunConfig) -> int:
    omega_value = Fraction(args.omega)
    params = SieveParams.constant_omega(args.B, args.Q, omega_value, args.r)
    L = large_sieve_L(params)
    result = {"B": args.B, "Q": args.Q, "r": args.r, "degree": 1, "omega": float(omega_value),
              "L": L, "bound": sieve_bound(params), "bound_note": "up to an absolute constant"}
    emit(envelope("sieve", cfg, result), cfg)
    return EXIT_OK


def cmd_scan(args, cfg: RunConfig) -> int:
    report = density_scan(args.family, args.B, parse_ints(args.ells), args.pmax, cfg.seed,
                          budget=args.budget, jobs=args.jobs)
    if cfg.format == "csv":
        sys.stdout.write(report.to_csv())
    else:
        emit(envelope("scan", cfg, report.to_document()), cfg)
    return EXIT_OK


def cmd_sample(args, cfg: RunConfig) -> int:
    frac = equidistribution_sample(args.family, args.p, args.predicate, args.samples, cfg.seed)
    result = {"family": args.family, "p": args.p, "predicate": args.predicate,
              "samples": args.samples, "fraction": frac}
    emit(envelope("sample", cfg, result), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--config", help="file of key = value lines")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="gspsieve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("group-verify", parents=[common], help="run the finite-group verification battery")
    p.add_argument("--only", action="append", help=f"run only this check ({', '.join(BATTERY)})")
    p.set_defaults(func=cmd_group_verify)

    p = sub.add_parser("charpoly", parents=[common], help="Frobenius polynomials of curves at p")
    p.add_argument("curves", help="curve file")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_charpoly)

    p = sub.add_parser("galois", parents=[common], help="Galois group of a quartic or of Frobenius quartics")
    p.add_argument("--quartic", help="coefficients a0 .. a4")
    p.add_argument("--curves", help="curve file")
    p.add_argument("--p", type=int)
    p.add_argument("--norm", action="store_true", help="also compute the y^2 - xz norm for D4 cases")
    p.set_defaults(func=cmd_galois)

    p = sub.add_parser("certify", parents=[common], help="surjectivity certificates for genus-2 curves")
    p.add_argument("curves", help="curve file")
    p.add_argument("--limit", type=_positive_int, help="largest prime to scan (default prime_limit)")
    p.add_argument("--h-bound", type=float, help="height bound (default: proxy from the naive height)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("modulus", parents=[common], help="cycle-type witnesses for a reciprocal polynomial")
    p.add_argument("file", nargs="?", help="file with coefficients a0 .. a2g")
    p.add_argument("--poly", help="coefficients a0 .. a2g inline")
    p.add_argument("--C", type=int)
    p.add_argument("--bound", type=_positive_int)
    p.set_defaults(func=cmd_modulus)

    p = sub.add_parser("sieve", parents=[common], help="large-sieve L(Q) and bound")
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--r", type=_positive_int, default=1)
    p.add_argument("--omega", default="0", help="constant omega_p for p <= Q, e.g. 1/2")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("scan", parents=[common], help="density scan over a coefficient box")
    p.add_argument("--family", required=True, help='e.g. "* * 0 0 0 1"')
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--ells", default="3", help="comma-separated odd primes")
    p.add_argument("--pmax", type=_positive_int, default=50)
    p.add_argument("--budget", type=_positive_int, default=50_000)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sample", parents=[common], help="equidistribution sampler over F_p")
    p.add_argument("--family", default="* * * * * *")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--predicate", default="D4", help="true | false | D4 | pattern:2+1+1@3")
    p.add_argument("--samples", type=_positive_int, default=2000)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        saved = curves.MAX_FIELD
        curves.MAX_FIELD = cfg.field_size
        try:
            return args.func(args, cfg)
        finally:
            curves.MAX_FIELD = saved
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except GspSieveError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
