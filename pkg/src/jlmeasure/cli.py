"""Command-line front end (``jlm``).

Exit status: 0 on success or verdict ``equal``, 2 on ``not_equal``,
3 on ``inconclusive``, 1 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

import mpmath

from . import schemas
from .adelic import CovolumeExpr, GlobalSetup, covolume_equality_check, covolume_S_arithmetic
from .errors import JLMError, TruncationError
from .localgeom import (
    LocalAlgebraSpec,
    disc_norm,
    disc_norm_symbolic,
    tamagawa_volume_max_compact,
    volume_max_compact_mult,
)
from .plancherel import (
    CH1,
    DS2,
    STEINBERG_CONVENTIONS,
    ArchTemperedParam,
    Target,
    arch_formal_degree,
    jl_match_real,
    jl_real_to_json,
    plancherel_ratio,
    steinberg_degree,
)
from .symexpr import NumericValue, SymbolicScalar, evaluate_at, parse
from .verdict import EQUAL, INCONCLUSIVE, NOT_EQUAL, Verdict
from .verify import verify_all, verify_jl_preservation
from .vndensity import LatticeDatum, gamma_density, gamma_dimension, ps_density

EXIT_OK, EXIT_INPUT, EXIT_NOT_EQUAL, EXIT_INCONCLUSIVE = 0, 1, 2, 3
_VERDICT_EXIT = {EQUAL: EXIT_OK, NOT_EQUAL: EXIT_NOT_EQUAL, INCONCLUSIVE: EXIT_INCONCLUSIVE}


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


# -- helpers ------------------------------------------------------------------

def _load_json(path: str, schema: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise _Usage(f"{path} is not valid JSON: {exc}") from None
    schemas.validate(data, schema)
    return data


def _render(x, args, q: int | None = None) -> str:
    """Canonical text, or a decimal with ``--numeric``."""
    if isinstance(x, NumericValue):
        with mpmath.workdps(args.digits + 5):
            v = x.value if not isinstance(x.value, Fraction) else mpmath.mpf(x.value.numerator) / x.value.denominator
            return mpmath.nstr(v, args.digits)
    if isinstance(x, SymbolicScalar):
        if args.numeric:
            if not x.is_constant() and q is None:
                raise _Usage("--numeric needs a concrete q")
            val = evaluate_at(x, q, args.digits + 5).value
            with mpmath.workdps(args.digits + 5):
                if isinstance(val, Fraction):
                    val = mpmath.mpf(val.numerator) / val.denominator
                return mpmath.nstr(val, args.digits)
        return x.to_text()
    return str(x)


def _emit(args, rows: list[dict], columns: Sequence[str], text: str | None = None,
          extra: dict | None = None) -> None:
    out = sys.stdout
    if args.format == "json":
        doc = {"command": args.command}
        doc.update(rows[0] if len(rows) == 1 and not extra else {"rows": rows})
        if extra:
            doc.update(extra)
        out.write(json.dumps(doc, ensure_ascii=False, default=str) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        if text is None:
            text = "\n".join("\t".join(str(r.get(c, "")) for c in columns) for r in rows)
        out.write(text + "\n")


def _spec_from_args(args) -> LocalAlgebraSpec:
    if args.input:
        return LocalAlgebraSpec.from_json(_load_json(args.input, "local_spec"))
    if args.n is None or args.d is None or args.dv is None:
        raise _Usage("give --n, --d and --dv, or --input")
    return LocalAlgebraSpec.from_local_index(args.n, args.d, args.dv, q=args.q,
                                             local_disc_norm=args.disc)


def _verdict_exit(v: Verdict) -> int:
    return _VERDICT_EXIT[v.status]


# -- subcommands ----------------------------------------------------------------

def cmd_volume(args) -> int:
    spec = _spec_from_args(args)
    res = volume_max_compact_mult(spec) if args.normalization == "multiplicative" \
        else tamagawa_volume_max_compact(spec)
    row = {"n": spec.n, "d": spec.d, "n_v": spec.n_v, "d_v": spec.d_v,
           "q": "symbolic" if spec.q is None else spec.q,
           "normalization": res.normalization.value, "value": _render(res.value, args, spec.q)}
    if res.has_formal_sqrt:
        row["formal_factor"] = res.meta["formal_factor"]
    _emit(args, [row], ["n", "d", "n_v", "d_v", "q", "normalization", "value", "formal_factor"],
          row["value"] + (f"·{row['formal_factor']}" if res.has_formal_sqrt else ""))
    return EXIT_OK


def cmd_disc_norm(args) -> int:
    spec = _spec_from_args(args)
    value = disc_norm(spec) if spec.q is not None or spec.d_v == 1 else disc_norm_symbolic(spec).to_text()
    row = {"n": spec.n, "d": spec.d, "n_v": spec.n_v, "d_v": spec.d_v,
           "q": "symbolic" if spec.q is None else spec.q, "value": str(value)}
    _emit(args, [row], ["n", "d", "n_v", "d_v", "q", "value"], str(value))
    return EXIT_OK


def cmd_steinberg(args) -> int:
    const = Fraction(args.constant) if args.constant else None
    deg = steinberg_degree(args.m, args.e, args.q, const)
    row = {"m": args.m, "e": args.e, "q": "symbolic" if args.q is None else args.q,
           "value": _render(deg.value, args, args.q)}
    _emit(args, [row], ["m", "e", "q", "value"], row["value"])
    return EXIT_OK


def cmd_ratio(args) -> int:
    spec = _spec_from_args(args)
    r = plancherel_ratio(spec, args.convention)
    row = {"n": spec.n, "d": spec.d, "n_v": spec.n_v, "d_v": spec.d_v,
           "q": "symbolic" if spec.q is None else spec.q, "convention": args.convention,
           "ratio": _render(r, args, spec.q)}
    _emit(args, [row], ["n", "d", "n_v", "d_v", "q", "convention", "ratio"], row["ratio"])
    return EXIT_OK if r == 1 else EXIT_NOT_EQUAL


def _param_from_args(args) -> ArchTemperedParam:
    if args.input:
        return ArchTemperedParam.from_json(_load_json(args.input, "tempered_param"))
    if args.blocks:
        return ArchTemperedParam(tuple(_parse_block(b) for b in args.blocks.split(",")),
                                 Target(args.target))
    if args.k is None:
        raise _Usage("give --k, --blocks or --input")
    return ArchTemperedParam((DS2(args.k),), Target(args.target))


def _parse_block(token: str):
    # "ds:K" or "ch:SIGN:T"
    parts = token.strip().split(":")
    try:
        if parts[0] == "ds" and len(parts) == 2:
            return DS2(int(parts[1]))
        if parts[0] == "ch" and len(parts) == 3:
            return CH1(1 if parts[1] == "+" else -1 if parts[1] == "-" else int(parts[1]), float(parts[2]))
    except ValueError:
        pass
    raise _Usage(f"bad block {token!r}; use ds:K or ch:SIGN:T")


def cmd_arch_degree(args) -> int:
    if args.k_max:
        rows = []
        for k in range(1, args.k_max + 1):
            deg = arch_formal_degree(ArchTemperedParam((DS2(k),), Target(args.target)))
            rows.append({"k": k, "degree": _render(deg.value, args)})
        _emit(args, rows, ["k", "degree"])
        return EXIT_OK
    deg = arch_formal_degree(_param_from_args(args))
    row = {"representation": deg.representation_tag, "degree": _render(deg.value, args)}
    _emit(args, [row], ["representation", "degree"], row["degree"])
    return EXIT_OK


def cmd_jl_real(args) -> int:
    param = _param_from_args(args)
    out = jl_real_to_json(jl_match_real(param))
    if args.format == "json":
        sys.stdout.write(json.dumps({"command": args.command, "input": param.to_json(), "image": out}) + "\n")
    elif args.format == "csv":
        _emit(args, [{"zero": "zero" in out, "image": json.dumps(out)}], ["zero", "image"])
    else:
        sys.stdout.write(("0" if out.get("zero") else json.dumps(out)) + "\n")
    return EXIT_OK


def cmd_covolume(args) -> int:
    expr = CovolumeExpr.from_json(_load_json(args.input, "covolume_expr"))
    try:
        val = covolume_S_arithmetic(expr, args.prime_cap)
    except TruncationError as exc:
        sys.stderr.write(f"jlm: error: {exc} (best value {exc.value!r}, bound {exc.error_bound!r})\n")
        return EXIT_INPUT
    if isinstance(val, NumericValue):
        row = {"value": _render(val, args), "error_bound": f"{val.error_bound:.3e}", "exact": False}
    else:
        row = {"value": _render(val, args), "error_bound": "0", "exact": True}
    _emit(args, [row], ["value", "error_bound", "exact"], row["value"])
    return EXIT_OK


def cmd_check_covolume_eq(args) -> int:
    data = _load_json(args.input, "covolume_check")
    setup = GlobalSetup.from_json(data["setup"])
    v = covolume_equality_check(CovolumeExpr.from_json(data["left"]), CovolumeExpr.from_json(data["right"]),
                                setup)
    row = v.to_json()
    _emit(args, [row], ["verdict", "witness", "reason"], v.status + (f" ({v.witness or v.reason})"
                                                                       if v.witness or v.reason else ""))
    return _verdict_exit(v)


def _bindings(args) -> dict:
    return {"k": args.k} if args.k is not None else {}


def cmd_gamma_dim(args) -> int:
    covol = parse(args.covol)
    if args.k_range:
        lo, hi = (int(x) for x in args.k_range.split(":"))
        rows = []
        for k in range(lo, hi + 1):
            dim = gamma_dimension(LatticeDatum(covol), parse(args.degree, {"k": k}))
            rows.append({"k": k, "gamma_dimension": _render(dim, args)})
        _emit(args, rows, ["k", "gamma_dimension"])
        return EXIT_OK
    dim = gamma_dimension(LatticeDatum(covol), parse(args.degree, _bindings(args)))
    row = {"gamma_dimension": _render(dim, args)}
    _emit(args, [row], ["gamma_dimension"], row["gamma_dimension"])
    return EXIT_OK


def cmd_gamma_density(args) -> int:
    covol = parse(args.covol)
    sign = 1 if args.sign == "+" else -1
    lat = LatticeDatum(covol, normalization="sl2_iwasawa")
    from .vndensity import sl2_principal_series_density
    dens = gamma_density(lat, sl2_principal_series_density(sign))
    if args.t:
        ts = [float(x) for x in args.t.split(",")]
        rows = [{"t": t, "ps_density": f"{ps_density(t, sign):.{args.digits}g}",
                 "gamma_density": f"{dens(t):.{args.digits}g}"} for t in ts]
        _emit(args, rows, ["t", "ps_density", "gamma_density"])
        return EXIT_OK
    row = {"coefficient": dens.coefficient.to_text(), "profile": dens.profile,
           "reference_measure": dens.reference_measure, "density": dens.to_text()}
    _emit(args, [row], ["coefficient", "profile", "reference_measure"], dens.to_text())
    return EXIT_OK


def cmd_verify_all(args) -> int:
    rows = [r.to_json() for r in verify_all(args.max_nd, args.prime_cap, not args.skip_oracle)]
    ok = all(r["passed"] for r in rows)
    if args.format == "text":
        width = max(len(r["check"]) for r in rows)
        lines = [f"{r['check']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}  cases={r['cases']:<5} "
                 f"{r['seconds']:7.3f}s  {r['detail']}".rstrip() for r in rows]
        _emit(args, rows, [], "\n".join(lines))
    else:
        _emit(args, rows, ["check", "cases", "passed", "seconds", "detail"],
              extra={"all_passed": ok})
    return EXIT_OK if ok else EXIT_NOT_EQUAL


def cmd_verify_jl(args) -> int:
    data = _load_json(args.input, "jl_setup")
    setup = GlobalSetup.from_json(data["setup"])
    specs = {_label(k): LocalAlgebraSpec.from_json(v) for k, v in data["local_specs"].items()}
    report = verify_jl_preservation(setup, specs)
    if args.format == "json":
        sys.stdout.write(json.dumps({"command": args.command, **report}) + "\n")
    else:
        _emit(args, report["places"], ["place", "kind", "d_v", "ratio", "verdict"])
        if args.format == "text":
            note = report["tamagawa_compatibility"]
            sys.stdout.write(f"tamagawa compatibility: {note['verdict']}\nverdict: {report['verdict']}\n")
    return EXIT_OK if report["verdict"] == EQUAL else EXIT_NOT_EQUAL


def _label(s: str):
    return int(s) if s.isdigit() else s


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--numeric", action="store_true", help="evaluate exact results as decimals")
    common.add_argument("--digits", type=int, default=15)
    common.add_argument("--prime-cap", type=int, default=None,
                        help="sieve bound for Euler tails (default: JLM_PRIME_CAP or 10**6)")
    common.add_argument("--input", help="JSON input file")

    spec = _Parser(add_help=False)
    spec.add_argument("--n", type=int)
    spec.add_argument("--d", type=int)
    spec.add_argument("--dv", type=int, help="local index d_v")
    spec.add_argument("--q", type=int, help="residue field size (omit for symbolic q)")
    spec.add_argument("--disc", type=int, default=1, help="norm of the local discriminant d(F_v)")

    param = _Parser(add_help=False)
    param.add_argument("--k", type=int)
    param.add_argument("--blocks", help="comma list of ds:K and ch:SIGN:T blocks")
    param.add_argument("--target", choices=[t.value for t in Target], default="real_group")

    p = _Parser(prog="jlm", description="Plancherel measures, covolumes and Gamma-dimensions "
                                        "for GL(n) and its inner forms.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("volume", parents=[common, spec], help="volume of the maximal compact subgroup")
    s.add_argument("--normalization", choices=["multiplicative", "tamagawa"], default="multiplicative")
    s.set_defaults(func=cmd_volume)
    s = sub.add_parser("disc-norm", parents=[common, spec], help="discriminant norm of the maximal order")
    s.set_defaults(func=cmd_disc_norm)
    s = sub.add_parser("steinberg", parents=[common], help="Steinberg formal degree of GL(m, D)")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--e", type=int, default=1, help="index of D")
    s.add_argument("--q", type=int)
    s.add_argument("--constant", help="leading constant (default 1/(m e))")
    s.set_defaults(func=cmd_steinberg)
    s = sub.add_parser("ratio", parents=[common, spec], help="Plancherel density ratio")
    s.add_argument("--convention", choices=STEINBERG_CONVENTIONS, default="nd")
    s.set_defaults(func=cmd_ratio)
    s = sub.add_parser("arch-degree", parents=[common, param], help="formal degree of H_k / V_k")
    s.add_argument("--k-max", type=int, help="table for k = 1..K")
    s.set_defaults(func=cmd_arch_degree)
    s = sub.add_parser("jl-real", parents=[common, param], help="real Jacquet-Langlands map")
    s.set_defaults(func=cmd_jl_real)
    s = sub.add_parser("covolume", parents=[common], help="S-arithmetic covolume from a JSON expression")
    s.set_defaults(func=cmd_covolume)
    s = sub.add_parser("check-covolume-eq", parents=[common], help="compare two covolume expressions")
    s.set_defaults(func=cmd_check_covolume_eq)
    s = sub.add_parser("gamma-dim", parents=[common], help="covolume times formal degree")
    s.add_argument("--covol", required=True)
    s.add_argument("--degree", required=True, help="expression, may use k")
    s.add_argument("--k", type=int)
    s.add_argument("--k-range", help="table over k = LO:HI")
    s.set_defaults(func=cmd_gamma_dim)
    s = sub.add_parser("gamma-density", parents=[common], help="covolume times principal series density")
    s.add_argument("--covol", default="pi/3")
    s.add_argument("--sign", choices=["+", "-"], default="+")
    s.add_argument("--t", help="comma list of t values for a table")
    s.set_defaults(func=cmd_gamma_density)
    s = sub.add_parser("verify-all", parents=[common], help="run every invariant sweep")
    s.add_argument("--max-nd", type=int, default=12)
    s.add_argument("--skip-oracle", action="store_true", help="skip brute-force volume enumeration")
    s.set_defaults(func=cmd_verify_all)
    s = sub.add_parser("verify-jl", parents=[common], help="per-place Plancherel report for a global setup")
    s.set_defaults(func=cmd_verify_jl)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.prime_cap is None and os.environ.get("JLM_PRIME_CAP"):
            from .adelic import default_prime_cap
            args.prime_cap = default_prime_cap()
        if getattr(args, "input", None) is None and args.command in ("covolume", "check-covolume-eq", "verify-jl"):
            raise _Usage(f"{args.command} needs --input")
        return args.func(args)
    except _Usage as exc:
        sys.stderr.write(f"jlm: error: {exc}\n")
        return EXIT_INPUT
    except (JLMError, ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"jlm: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
