"""Command line front end: ``henselqf <subcommand> --field F ...``.

Exit codes: 0 when a result was computed (whatever its truth value), 1 when
``oracle check`` found a disagreement, 2 on input errors, 3 when a search budget
ran out.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import invariants, oracle, qform, valgroup
from .dsl import DslError, parse_element, parse_field, parse_form, render_element
from .dyadic import RatGram, SingularFormError, find_tame_binary
from .fieldtower import FieldError, QuadClosed, FieldDesc, ValuationError, is_square, square_class, valuation

EXIT_OK, EXIT_DISAGREE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    def __init__(self, code, message, span=None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _field(args) -> FieldDesc:
    if not args.field:
        raise InputError("missing_field", "this subcommand needs --field")
    return parse_field(args.field)


def _form(args, src):
    return parse_form(src, _field(args))


def _verdict(args, op, key, v: qform.Verdict, extra=None) -> dict:
    out = {"schema": "verdict_v1", "op": op, "field": args.field, key: v.value}
    out["witness"] = v.witness
    if extra:
        out.update(extra)
    if args.trace:
        out["trace"] = v.trace
    return out


# ---------------------------------------------------------------- handlers


def cmd_isotropy(args):
    phi = _form(args, args.form)
    return _verdict(args, "isotropy", "isotropic", qform.is_isotropic(phi), {"form": str(qform.as_diag(phi))})


def cmd_hyperbolic(args):
    phi = _form(args, args.form)
    return _verdict(args, "hyperbolic", "hyperbolic", qform.is_hyperbolic(phi), {"form": str(qform.as_diag(phi))})


def cmd_torsion(args):
    phi = _form(args, args.form)
    return _verdict(args, "torsion", "torsion", qform.is_torsion(phi), {"form": str(qform.as_diag(phi))})


def cmd_witt(args):
    phi = _form(args, args.form)
    w = qform.witt_decompose(phi)
    out = {
        "schema": "verdict_v1",
        "op": "witt",
        "field": args.field,
        "form": str(qform.as_diag(phi)),
        "witt_index": w.witt_index,
        "anisotropic_part": str(w.anisotropic_part),
    }
    if args.trace:
        out["trace"] = w.trace
    return out


def cmd_equiv(args):
    phi, psi = _form(args, args.form), _form(args, args.other)
    return _verdict(args, "equiv", "witt_equivalent", qform.witt_equivalent(phi, psi))


def cmd_represents(args):
    K = _field(args)
    phi = parse_form(args.form, K)
    b = parse_element(args.value, K)
    if b.is_zero():
        raise InputError("zero_value", "represents needs a nonzero value; use isotropy for 0")
    return _verdict(args, "represents", "represents", qform.represents(phi, b), {"value": str(b)})


def cmd_residues(args):
    phi = qform.as_diag(_form(args, args.form))
    parts = []
    for c, u in qform.coset_decompose(phi).parts:
        parts.append({"c": str(c), "unimodular": str(u), "residue_form": str(qform.residue_form(u))})
    return {"schema": "residues_v1", "field": args.field, "form": str(phi), "cosets": parts}


def cmd_squareclass(args):
    K = _field(args)
    a = parse_element(args.element, K)
    if a.is_zero():
        raise InputError("zero_value", "square class of zero is undefined")
    sc = square_class(a)
    return {
        "schema": "squareclass_v1",
        "field": args.field,
        "element": render_element(a),
        "valuation": [_jsonable(Fraction(x)) for x in valuation(a)],
        "parity": list(sc.parity),
        "base_bit": sc.square,
        "is_square": is_square(a),
    }


def _parse_ordering(text, K):
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, _, sign = part.partition("=")
        sign = sign.strip()
        if sign not in ("+", "-", "+1", "-1", "1"):
            raise InputError("bad_ordering", f"ordering entry {part!r} must look like t=+ or t=-")
        out[name.strip()] = -1 if sign.startswith("-") else 1
    for name in out:
        K.var_index(name)
    return out


def cmd_signature(args):
    K = _field(args)
    phi = parse_form(args.form, K)
    orders = [_parse_ordering(args.ordering, K)] if args.ordering else qform.orderings(K)
    sigs = [{"ordering": o, "signature": qform.signature(phi, o)} for o in orders]
    return {"schema": "signature_v1", "field": args.field, "form": str(qform.as_diag(phi)), "signatures": sigs}


def cmd_uinv(args):
    return invariants.report(_field(args)).to_dict()


def cmd_facts(args):
    rows = invariants.fact(args.id) if args.id else invariants.facts_table()
    return {
        "schema": invariants.FACTS_VERSION,
        "facts": [
            {"id": f.id, "statement": f.statement, "hypothesis": f.hypothesis, "value": f.value, "anchor": f.anchor}
            for f in rows
        ],
    }


def _parse_sub(text, rank):
    rows = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        try:
            row = [int(x) for x in part.split(",")]
        except ValueError:
            raise InputError("bad_matrix", f"row {part!r} is not a comma separated list of integers") from None
        if len(row) != rank:
            raise InputError("bad_matrix", f"row {part!r} has {len(row)} entries, expected {rank}")
        rows.append(row)
    return rows


def cmd_group(args):
    if args.rank < 0:
        raise InputError("bad_rank", "rank must be nonnegative")
    if args.n <= 0:
        raise InputError("bad_n", "n must be a positive integer")
    H = _parse_sub(args.sub or "", args.rank)
    g, h, r = valgroup.index_mod_n(args.rank, H, args.n)
    return {"schema": "group_v1", "rank": args.rank, "n": args.n, "indexG": g, "indexH": h, "rrk": r}


def _rat_gram(text) -> RatGram:
    src = text.strip()
    if src.startswith("[") and '"' in src:
        # JSON with string rationals
        try:
            S = [[Fraction(str(x)) for x in row] for row in json.loads(src)]
        except (ValueError, TypeError) as e:
            raise InputError("bad_matrix", f"cannot read Gram matrix: {e}") from None
        return RatGram.from_symmetric(S)
    g = parse_form(src, FieldDesc(QuadClosed()))
    if isinstance(g, qform.DiagForm):
        return RatGram(g.dim, {(i, i): a.num.get((), 0) for i, a in enumerate(g.entries)})
    return RatGram(g.n, {k: c.num.get((), Fraction(0)) for k, c in g.coeffs.items()})


def cmd_tame(args):
    if args.bound < 1:
        raise InputError("bad_bound", "--bound must be at least 1")
    phi = _rat_gram(args.gram)
    res = find_tame_binary(phi, args.bound)
    out = {"schema": "tame_v1", "bound": args.bound}
    out.update(res.to_dict())
    return out


def cmd_oracle_check(args):
    fields = [args.field] if args.field else ["GF(3)((t))", "GF(5)((t))"]
    checked, bad = 0, []
    for i, f in enumerate(fields):
        n, dis = oracle.check_family(parse_field(f), args.count, args.seed + i, window=args.window)
        checked += n
        bad.extend({"field": f, "form": d.form, "engine": d.engine, "oracle": d.oracle, "window": d.window} for d in dis)
    out = {"schema": "oracle_v1", "seed": args.seed, "checked": checked, "disagreements": bad}
    return out, (EXIT_DISAGREE if bad else EXIT_OK)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help='field tower, e.g. "GF(5)((t))((s))"')
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--trace", action="store_true", help="include the coset/residue trace")

    p = argparse.ArgumentParser(prog="henselqf", description="Quadratic forms over henselian towers.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, *pos):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        for arg, h in pos:
            sp.add_argument(arg, help=h)
        sp.set_defaults(fn=fn)
        return sp

    add("isotropy", cmd_isotropy, "is the form isotropic", ("form", "form literal"))
    add("hyperbolic", cmd_hyperbolic, "is the form hyperbolic", ("form", "form literal"))
    add("torsion", cmd_torsion, "is the form torsion", ("form", "form literal"))
    add("witt", cmd_witt, "Witt index and anisotropic part", ("form", "form literal"))
    add("equiv", cmd_equiv, "Witt equivalence", ("form", "first form"), ("other", "second form"))
    add("represents", cmd_represents, "does the form represent a value", ("form", "form"), ("value", "element"))
    add("residues", cmd_residues, "coset decomposition and residue forms", ("form", "form literal"))
    add("squareclass", cmd_squareclass, "valuation and square class", ("element", "element"))
    sp = add("signature", cmd_signature, "signatures on a real tower", ("form", "form literal"))
    sp.add_argument("--ordering", help='signs such as "t=+,s=-"; default: all orderings')
    add("uinv", cmd_uinv, "u-invariant report")
    add("uhat", cmd_uinv, "strong u-invariant report")
    sp = add("facts", cmd_facts, "table of referenced facts")
    sp.add_argument("id", nargs="?", help="fact id, e.g. MMW")
    sp = add("group", cmd_group, "indices [G:nG], [H:nH] for H in Z^rank")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--sub", default="", help='generators of H, rows split by ";", e.g. "2,0;0,3"')
    sp.add_argument("--n", type=int, required=True)
    sp = add("tame", cmd_tame, "2-adic tame binary subform search", ("gram", "Gram matrix or form"))
    sp.add_argument("--bound", type=int, default=8)
    orc = sub.add_parser("oracle", help="brute-force verification")
    osub = orc.add_subparsers(dest="oracle_command", required=True)
    sp = osub.add_parser("check", parents=[common], help="engine vs. oracle on seeded random forms")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--window", type=int, default=None)
    sp.set_defaults(fn=cmd_oracle_check)
    return p


# ---------------------------------------------------------------- rendering


def _render_text(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def _scalar(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def _emit(obj, fmt, stream):
    obj = _jsonable(obj)
    if fmt == "json":
        stream.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")
    else:
        stream.write(_render_text(obj) + "\n")


def _error(code, message, span=None) -> dict:
    err = {"code": code, "message": message}
    if span:
        err["span"] = span
    return {"schema": "error_v1", "error": err}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    fmt = getattr(args, "format", "text")
    try:
        result = args.fn(args)
        code = EXIT_OK
        if isinstance(result, tuple):
            result, code = result
        _emit(result, fmt, stdout)
        return code
    except DslError as e:
        _emit(_error(e.code, e.message, {"line": e.line, "col": e.col}), fmt, stderr)
    except InputError as e:
        _emit(_error(e.code, e.message, e.span), fmt, stderr)
    except (oracle.OracleBudgetError, OverflowError) as e:
        _emit(_error("budget_exhausted", str(e)), fmt, stderr)
        return EXIT_BUDGET
    except SingularFormError as e:
        _emit(_error("singular", str(e)), fmt, stderr)
    except qform.SingularFormError as e:
        _emit(_error("singular", str(e)), fmt, stderr)
    except (qform.FormError, FieldError, ValuationError, oracle.OracleUnsupported, ValueError) as e:
        _emit(_error(type(e).__name__, str(e)), fmt, stderr)
    return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
