"""Command-line front end over the library.

Single-shot computations, certificate verification, and the reproduction
suite, with deterministic machine-readable output.  JSON is the canonical
format; the text rendering is derived from the same payload.

Exit codes: 0 when the report's top-level verdict is pass/verified, 1 when
a check fails (including inconclusive verdicts), 2 on usage or data errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebra import (
    Algebra,
    algebra_from_entries,
    annihilator,
    change_basis,
    check_identity,
    derivation_dimension,
    fingerprint,
    power_filtration,
)
from .catalog import (
    CatalogError,
    SuiteConfig,
    certificate_from_dict,
    entry,
    entry_to_json,
    extension_records,
    get,
    list_ids,
    parse_ref,
    record_form,
    rset_rows,
    verify_all,
)
from .cohomology import central_extension, delta_form, extension_wellformed, h2, is_cocycle
from .degeneration import RSet, rset_membership, verify_certificate
from .exactmath import ExactMatrix, grat
from .series import evaluate_scalar

PASS_VERDICTS = ("pass", "verified")


# ---------------------------------------------------------------------------
# rendering helpers
# ---------------------------------------------------------------------------


def _scalar(v) -> str:
    return str(v)


def _vector_text(vec) -> str:
    """Render a coordinate vector as a combination of basis vectors."""
    terms = []
    for i, v in enumerate(vec, start=1):
        if not v:
            continue
        if v == grat(1):
            t = f"e{i}"
        elif v == grat(-1):
            t = f"-e{i}"
        else:
            t = f"{v}*e{i}"
        terms.append(t)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += t if t.startswith("-") else "+" + t
    return out


def _form_text(mat: ExactMatrix) -> str:
    """Render a bilinear form as a combination of Delta_ij symbols."""
    terms = []
    for i in range(mat.nrows):
        for j in range(mat.ncols):
            v = mat.rows[i][j]
            if not v:
                continue
            if v == grat(1):
                t = f"D{i + 1}{j + 1}"
            elif v == grat(-1):
                t = f"-D{i + 1}{j + 1}"
            else:
                t = f"{v}*D{i + 1}{j + 1}"
            terms.append(t)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += t if t.startswith("-") else "+" + t
    return out


def _entries_payload(A: Algebra) -> list:
    return [[i, j, k, _scalar(v)] for (i, j, k, v) in A.entries()]


def _entries_text(A: Algebra) -> list:
    lines = []
    for i in range(A.dim):
        for j in range(A.dim):
            if any(A.c[i][j]):
                lines.append(f"e{i + 1} e{j + 1} = {_vector_text(A.c[i][j])}")
    return lines


def _emit(payload: dict, lines: list, fmt: str) -> int:
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for ln in lines:
            print(ln)
    return 0 if payload.get("verdict") in PASS_VERDICTS else 1


# ---------------------------------------------------------------------------
# input loading
# ---------------------------------------------------------------------------


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CatalogError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path} is not valid JSON: {exc}") from exc


def _algebra_from_file(path: str) -> Algebra:
    raw = _load_json(path)
    if not isinstance(raw, dict) or "dim" not in raw or "entries" not in raw:
        raise CatalogError(f"{path}: expected an object with dim and entries")
    label = raw.get("label") or raw.get("id") or path
    return algebra_from_entries(int(raw["dim"]), raw["entries"], label=label)


def _resolve_algebra(args) -> Algebra:
    if getattr(args, "file", None):
        return _algebra_from_file(args.file)
    if not getattr(args, "algebra", None):
        raise CatalogError("an algebra is required: pass --algebra or --file")
    eid, params = parse_ref(args.algebra)
    if eid == "zero" and getattr(args, "dim", None):
        params = dict(params)
        params.setdefault("dim", args.dim)
    elif getattr(args, "dim", None):
        raise CatalogError("--dim only applies to the zero algebra")
    return get(eid, params or None)


def _matrix_from_rows(rows) -> ExactMatrix:
    return ExactMatrix([[grat(v) for v in row] for row in rows])


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_identity(args) -> int:
    A = _resolve_algebra(args)
    rep = check_identity(A, args.id)
    payload = {
        "command": "identity",
        "algebra": A.label,
        "kind": rep.kind,
        "verdict": "pass" if rep.ok else "fail",
    }
    lines = [f"identity {rep.kind} on {A.label}: {payload['verdict']}"]
    if not rep.ok:
        payload["witness"] = {
            "indices": list(rep.witness),
            "lhs": [_scalar(v) for v in rep.lhs],
            "rhs": [_scalar(v) for v in rep.rhs],
        }
        spot = ", ".join(f"e{i}" for i in rep.witness)
        lines.append(
            f"witness ({spot}): "
            f"lhs {_vector_text(rep.lhs)} != rhs {_vector_text(rep.rhs)}"
        )
    return _emit(payload, lines, args.format)


def _cmd_ann(args) -> int:
    A = _resolve_algebra(args)
    basis = annihilator(A)
    payload = {
        "command": "ann",
        "algebra": A.label,
        "dim": len(basis),
        "basis": [[_scalar(v) for v in vec] for vec in basis],
        "verdict": "pass",
    }
    lines = [f"dim Ann = {len(basis)}"]
    lines += [f"  {_vector_text(vec)}" for vec in basis]
    return _emit(payload, lines, args.format)


def _cmd_powers(args) -> int:
    A = _resolve_algebra(args)
    filt = power_filtration(A)
    payload = {
        "command": "powers",
        "algebra": A.label,
        "dims": list(filt.dims),
        "nilpotent": filt.nilpotent,
        "index": filt.index,
        "verdict": "pass",
    }
    lines = ["power dims: " + " ".join(str(d) for d in filt.dims)]
    if filt.nilpotent:
        lines.append(f"nilpotent of index {filt.index}")
    else:
        lines.append("not nilpotent")
    return _emit(payload, lines, args.format)


def _cmd_der(args) -> int:
    A = _resolve_algebra(args)
    dim = derivation_dimension(A, method=args.method)
    payload = {
        "command": "der",
        "algebra": A.label,
        "dim": dim,
        "method": args.method,
        "orbit_dim": A.dim * A.dim - dim,
        "verdict": "pass",
    }
    lines = [f"dim Der = {dim}", f"orbit dim = {A.dim * A.dim - dim}"]
    return _emit(payload, lines, args.format)


def _cmd_h2(args) -> int:
    A = _resolve_algebra(args)
    basis = h2(A)
    payload = {
        "command": "h2",
        "algebra": A.label,
        "dim_h2": len(basis.reps),
        "dim_z2": len(basis.z2),
        "dim_b2": len(basis.b2),
        "representatives": [_form_text(m) for m in basis.reps],
        "verdict": "pass",
    }
    lines = [f"dim H2 = {len(basis.reps)}"]
    lines += [f"  [{_form_text(m)}]" for m in basis.reps]
    lines.append(f"dim Z2 = {len(basis.z2)}, dim B2 = {len(basis.b2)}")
    return _emit(payload, lines, args.format)


def _cmd_fingerprint(args) -> int:
    A = _resolve_algebra(args)
    fp = fingerprint(A, method=args.method)
    payload = {
        "command": "fingerprint",
        "algebra": A.label,
        "dim": fp.dim,
        "power_dims": list(fp.power_dims),
        "ann_dim": fp.ann_dim,
        "der_dim": fp.der_dim,
        "z2_dim": fp.z2_dim,
        "h2_dim": fp.h2_dim,
        "method": args.method,
        "verdict": "pass",
    }
    lines = [
        f"fingerprint {A.label}: dim={fp.dim} "
        f"powers={'/'.join(str(d) for d in fp.power_dims)} "
        f"ann={fp.ann_dim} der={fp.der_dim} z2={fp.z2_dim} h2={fp.h2_dim}"
    ]
    return _emit(payload, lines, args.format)


def _cmd_extend(args) -> int:
    if args.child:
        return _extend_from_catalog(args)
    if not args.algebra or not args.file:
        raise CatalogError(
            "extend needs either --child <id> or --algebra <parent> with "
            "--file <cocycle.json>"
        )
    eid, params = parse_ref(args.algebra)
    if eid == "zero" and getattr(args, "dim", None):
        params = dict(params)
        params.setdefault("dim", args.dim)
    parent = get(eid, params or None)
    raw = _load_json(args.file)
    comps = raw.get("components") if isinstance(raw, dict) else raw
    if not isinstance(comps, list) or not comps:
        raise CatalogError(
            f"{args.file}: expected components: [[i, j, coeff], ...] lists"
        )
    form = delta_form(parent.dim, *comps)
    ok_cocycle = all(is_cocycle(parent, m) for m in form.mats)
    wf = extension_wellformed(parent, form)
    built = central_extension(parent, form, label=f"{parent.label} extension")
    verdict = "pass" if ok_cocycle and wf.ok else "fail"
    payload = {
        "command": "extend",
        "parent": parent.label,
        "cocycle": [_form_text(m) for m in form.mats],
        "is_cocycle": ok_cocycle,
        "ann_intersection_trivial": wf.ann_intersection_trivial,
        "classes_independent": wf.classes_independent,
        "ann_decomposition_ok": wf.ann_decomposition_ok,
        "extension": {"dim": built.dim, "entries": _entries_payload(built)},
        "verdict": verdict,
    }
    lines = [
        f"central extension of {parent.label} by "
        + ", ".join(_form_text(m) for m in form.mats)
        + f": {verdict}",
        f"cocycle condition: {'ok' if ok_cocycle else 'FAILS'}",
        f"wellformed: intersection_trivial={wf.ann_intersection_trivial} "
        f"classes_independent={wf.classes_independent} "
        f"ann_decomposition={wf.ann_decomposition_ok}",
    ]
    lines += _entries_text(built)
    return _emit(payload, lines, args.format)


def _extend_from_catalog(args) -> int:
    eid, params = parse_ref(args.child)
    recs = [r for r in extension_records() if r.child == eid]
    if not recs:
        raise CatalogError(f"no extension record with child {eid}")
    rec = recs[0]
    binding = {k: str(v) for k, v in (params or {}).items()}
    if rec.child_param is not None and not binding:
        raise CatalogError(
            f"{eid} is a family; bind its parameter, e.g. {eid}^1"
        )
    parent_binding = None
    if rec.parent_param is not None:
        psym = entry(rec.parent).symbols[0]
        parent_binding = {
            psym: evaluate_scalar(
                rec.parent_param,
                {k: evaluate_scalar(v) for k, v in binding.items()},
            )
        }
    parent = get(rec.parent, parent_binding)
    form = record_form(rec, binding)
    ok_cocycle = all(is_cocycle(parent, m) for m in form.mats)
    wf = extension_wellformed(parent, form)
    built = central_extension(parent, form)
    target = get(eid, binding or None)
    matches = built == target
    verdict = "pass" if ok_cocycle and wf.ok and matches else "fail"
    payload = {
        "command": "extend",
        "child": target.label,
        "parent": parent.label,
        "cocycle": [_form_text(m) for m in form.mats],
        "is_cocycle": ok_cocycle,
        "ann_intersection_trivial": wf.ann_intersection_trivial,
        "classes_independent": wf.classes_independent,
        "ann_decomposition_ok": wf.ann_decomposition_ok,
        "matches_catalog": matches,
        "verdict": verdict,
    }
    lines = [
        f"{target.label} as a central extension of {parent.label}: {verdict}",
        "cocycle: " + ", ".join(_form_text(m) for m in form.mats),
        f"cocycle condition: {'ok' if ok_cocycle else 'FAILS'}",
        f"wellformed: intersection_trivial={wf.ann_intersection_trivial} "
        f"classes_independent={wf.classes_independent} "
        f"ann_decomposition={wf.ann_decomposition_ok}",
        f"matches catalog constants: {matches}",
    ]
    return _emit(payload, lines, args.format)


def _cmd_act(args) -> int:
    A = _resolve_algebra(args)
    raw = _load_json(args.matrix)
    rows = raw.get("matrix") if isinstance(raw, dict) else raw
    if not isinstance(rows, list):
        raise CatalogError(f"{args.matrix}: expected a matrix (list of rows)")
    P = _matrix_from_rows(rows)
    if P.nrows != A.dim or P.ncols != A.dim:
        raise CatalogError(
            f"matrix is {P.nrows}x{P.ncols}, algebra dimension is {A.dim}"
        )
    if not P.det():
        raise CatalogError("matrix is singular; basis changes must be invertible")
    B = change_basis(A, P)
    payload = {
        "command": "act",
        "algebra": A.label,
        "det": _scalar(P.det()),
        "result": {"dim": B.dim, "entries": _entries_payload(B)},
        "verdict": "pass",
    }
    lines = [f"{A.label} transported along the given basis (det {P.det()}):"]
    lines += _entries_text(B) or ["(zero product)"]
    return _emit(payload, lines, args.format)


def _cmd_degenerate(args) -> int:
    if args.cert:
        cert = certificate_from_dict(_load_json(args.cert))
    elif args.label:
        from .catalog import certificates

        matches = [c for c in certificates() if c.label == args.label]
        if not matches:
            raise CatalogError(f"no catalog certificate labelled {args.label!r}")
        cert = matches[0]
    else:
        raise CatalogError("degenerate needs --cert <path> or --label <name>")
    report = verify_certificate(
        cert, mode=args.mode, trunc=args.truncation, precision=args.precision
    )
    payload = {
        "command": "degenerate",
        "label": report.label,
        "verdict": report.verdict,
        "mode": report.mode,
        "samples": [
            {
                "params": [[k, _scalar(v)] for k, v in s.params],
                "verdict": s.verdict,
                "mode": s.mode,
                "branch": [list(b) for b in s.branch],
                "max_residual": str(s.max_residual),
                "det_valuation": (
                    None if s.det_valuation is None else str(s.det_valuation)
                ),
                "failures": [[str(x) for x in f] for f in s.failures],
            }
            for s in report.samples
        ],
    }
    lines = [f"{report.label}: {report.verdict} ({report.mode})"]
    for s in report.samples:
        ptxt = (
            ", ".join(f"{k}={v}" for k, v in s.params) if s.params else "-"
        )
        extra = ""
        if s.mode == "numeric":
            extra = f", max residual {s.max_residual}"
        if s.det_valuation is not None:
            extra += f", det valuation {s.det_valuation}"
        lines.append(f"  sample [{ptxt}]: {s.verdict} ({s.mode}{extra})")
        for f in s.failures:
            lines.append(f"    mismatch: {f}")
    return _emit(payload, lines, args.format)


def _cmd_rset(args) -> int:
    if args.row:
        return _rset_row(args)
    if not args.file:
        raise CatalogError("rset needs --file <rset.json> or --row <source-id>")
    raw = _load_json(args.file)
    if not isinstance(raw, dict):
        raise CatalogError(f"{args.file}: expected an object")
    R = RSet(
        containments=tuple(tuple(c) for c in raw.get("containments", ())),
        equations=tuple(raw.get("equations", ())),
        relabel=tuple(raw["relabel"]) if raw.get("relabel") else None,
    )
    if not args.algebra:
        raise CatalogError("rset membership needs --algebra")
    eid, params = parse_ref(args.algebra)
    A = get(eid, params or None)
    member, witness = rset_membership(A, R)
    payload = {
        "command": "rset",
        "algebra": A.label,
        "member": member,
        "witness": witness,
        "verdict": "pass" if member else "fail",
    }
    lines = [f"{A.label}: {'inside' if member else 'outside'} the constraint set"]
    if witness:
        lines.append(f"  violated: {witness}")
    return _emit(payload, lines, args.format)


def _rset_row(args) -> int:
    rows = [r for r in rset_rows() if r.source == args.row]
    if not rows:
        raise CatalogError(f"no constraint row with source {args.row}")
    from .catalog import SPEC_SAMPLES, family_samples
    from dataclasses import replace as _replace

    row = rows[0]
    checks = []
    ok = True

    def sampled(eid):
        e = entry(eid)
        if not e.is_parametric:
            return [get(eid)]
        return [get(eid, b) for b in family_samples(eid, SPEC_SAMPLES)]

    for A in sampled(row.source):
        member, witness = rset_membership(A, row.rset)
        checks.append({"algebra": A.label, "role": "source", "member": member})
        ok = ok and member
    plain = _replace(row.rset, relabel=None)
    for tid in row.targets:
        for B in sampled(tid):
            member, witness = rset_membership(B, plain)
            checks.append({"algebra": B.label, "role": "target", "member": member})
            ok = ok and not member
    payload = {
        "command": "rset",
        "source": row.source,
        "targets": list(row.targets),
        "checks": checks,
        "verdict": "pass" if ok else "fail",
    }
    lines = [f"constraint row {row.source}: {'pass' if ok else 'fail'}"]
    for c in checks:
        want = "inside" if c["role"] == "source" else "outside"
        got = "inside" if c["member"] else "outside"
        mark = "ok" if want == got else "VIOLATION"
        lines.append(f"  {c['role']} {c['algebra']}: {got} ({mark})")
    return _emit(payload, lines, args.format)


def _cmd_catalog(args) -> int:
    if args.action == "list":
        tags = tuple(t for t in (args.tags or "").split(",") if t)
        ids = list_ids(tags) if tags else list_ids()
        payload = {"command": "catalog list", "ids": list(ids), "verdict": "pass"}
        return _emit(payload, list(ids), args.format)
    if args.action == "get":
        if not args.algebra:
            raise CatalogError("catalog get needs --algebra")
        eid, params = parse_ref(args.algebra)
        if params:
            A = get(eid, params)
            payload = {
                "command": "catalog get",
                "id": eid,
                "label": A.label,
                "dim": A.dim,
                "entries": _entries_payload(A),
                "verdict": "pass",
            }
            lines = [A.label, f"dim {A.dim}"] + _entries_text(A)
            return _emit(payload, lines, args.format)
        e = entry(eid)
        payload = json.loads(entry_to_json(e))
        payload["verdict"] = "pass"
        lines = [e.id, f"dim {e.dim}", "tags: " + ", ".join(e.tags)]
        if e.symbols:
            lines.append("parameters: " + ", ".join(e.symbols))
        lines += _entries_text(get(eid)) if not e.symbols else [
            f"{i},{j},{k} -> {v}" for (i, j, k, v) in e.entries
        ]
        return _emit(payload, lines, args.format)
    # verify-all
    checks = tuple(c for c in (args.checks or "").split(",") if c)
    config = SuiteConfig(
        checks=checks,
        mode=args.mode,
        trunc=args.truncation,
        jobs=args.jobs,
        seed=args.seed,
    )
    report = verify_all(config)
    if args.format == "json":
        payload = report.as_dict()
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print(report.as_text())
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zinbiel5",
        description=(
            "Exact verification toolkit for five-dimensional Zinbiel algebras"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument(
        "--format", choices=("text", "json"), default="text",
        help="output format (default text; json is canonical)",
    )
    src = argparse.ArgumentParser(add_help=False)
    src.add_argument(
        "--algebra", metavar="REF",
        help="catalog reference id[^param], e.g. Z_02^3 or V_4+1^lam=2,mu=5",
    )
    src.add_argument("--file", metavar="PATH", help="algebra JSON file")
    src.add_argument(
        "--dim", type=int, metavar="N",
        help="dimension (only with --algebra zero)",
    )

    p = sub.add_parser("identity", parents=[src, fmt], help="check an identity")
    p.add_argument(
        "--id", default="zinbiel", metavar="KIND",
        help="identity kind (default zinbiel)",
    )
    p.set_defaults(fn=_cmd_identity)

    p = sub.add_parser("ann", parents=[src, fmt], help="annihilator basis")
    p.set_defaults(fn=_cmd_ann)

    p = sub.add_parser("powers", parents=[src, fmt], help="power filtration")
    p.set_defaults(fn=_cmd_powers)

    p = sub.add_parser("der", parents=[src, fmt], help="derivation dimension")
    p.add_argument("--method", choices=("exact", "modular"), default="exact")
    p.set_defaults(fn=_cmd_der)

    p = sub.add_parser("h2", parents=[src, fmt], help="second cohomology")
    p.set_defaults(fn=_cmd_h2)

    p = sub.add_parser(
        "fingerprint", parents=[src, fmt], help="invariant fingerprint"
    )
    p.add_argument("--method", choices=("exact", "modular"), default="exact")
    p.set_defaults(fn=_cmd_fingerprint)

    p = sub.add_parser(
        "extend", parents=[src, fmt], help="build/verify a central extension"
    )
    p.add_argument(
        "--child", metavar="REF",
        help="verify the catalog extension record with this child",
    )
    p.set_defaults(fn=_cmd_extend)

    p = sub.add_parser(
        "act", parents=[src, fmt], help="transport along a basis change"
    )
    p.add_argument(
        "--matrix", required=True, metavar="PATH",
        help="JSON matrix (rows of scalars)",
    )
    p.set_defaults(fn=_cmd_act)

    p = sub.add_parser(
        "degenerate", parents=[fmt], help="verify a degeneration certificate"
    )
    p.add_argument("--cert", metavar="PATH", help="certificate JSON file")
    p.add_argument(
        "--label", metavar="NAME", help="catalog certificate label, e.g. 'Z_27 -> Z_28'"
    )
    p.add_argument("--mode", choices=("auto", "exact", "numeric"), default="auto")
    p.add_argument("--truncation", type=int, default=16, metavar="ORDER")
    p.add_argument(
        "--precision", type=int, default=None, metavar="BITS",
        help="numeric working precision in bits (default 256)",
    )
    p.set_defaults(fn=_cmd_degenerate)

    p = sub.add_parser("rset", parents=[fmt], help="constraint-set membership")
    p.add_argument("--algebra", metavar="REF", help="algebra to test")
    p.add_argument("--file", metavar="PATH", help="constraint-set JSON file")
    p.add_argument("--row", metavar="ID", help="check the catalog row with this source")
    p.set_defaults(fn=_cmd_rset)

    p = sub.add_parser("catalog", parents=[fmt], help="catalog operations")
    p.add_argument("action", choices=("list", "get", "verify-all"))
    p.add_argument("--algebra", metavar="REF", help="reference for catalog get")
    p.add_argument("--tags", metavar="T1,T2", help="filter ids by tags")
    p.add_argument("--checks", metavar="C1,C2", help="subset of suite checks")
    p.add_argument("--mode", choices=("auto", "exact", "numeric"), default="auto")
    p.add_argument("--truncation", type=int, default=16, metavar="ORDER")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.set_defaults(fn=_cmd_catalog)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (CatalogError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
