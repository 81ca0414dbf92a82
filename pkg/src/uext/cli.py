"""uext command line interface.

Exit codes: 0 verdict computed (yes, no or unknown all count), 1 bad input,
2 resource cap exceeded, 3 internal cross-check defect.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import census as census_mod
from .errors import DefectError, InputError, ResourceError
from .fo import eval_fo, ef_min_rounds, format_fo, los_like_check, parse_fo
from .frame import frame_to_dict, frame_to_dot, load_frame
from .hulls import canonical_form, endpoints, hull, hull_formula
from .modal import Model, eval_modal, frame_valid, n_bisimilar, parse_modal
from .ultra import Ultrafilter, build_ue


def _load_model(path: str) -> Model:
    frame = load_frame(path)
    with open(path) as fh:
        doc = json.load(fh)
    val = doc.get("valuation", {})
    if not isinstance(val, dict):
        raise InputError("valuation must be an object mapping letters to vertex lists")
    return Model.make(frame, {p: list(map(str, xs)) for p, xs in val.items()})


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write("\n")


def cmd_ue_build(args) -> int:
    frame = load_frame(args.frame)
    ue = build_ue(frame)
    if args.dot:
        sys.stdout.write(frame_to_dot(ue.frame))
    else:
        _emit(frame_to_dict(ue.frame))
    return 0


def cmd_ue_cross_check(args) -> int:
    frame = load_frame(args.frame)
    build_ue(frame)  # raises DefectError if the three relation modes disagree
    _emit({"frame": args.frame, "modes_agree": True})
    return 0


def cmd_modal_eval(args) -> int:
    model = _load_model(args.model)
    phi = parse_modal(args.formula)
    model.frame.check_vertices([args.at])
    _emit({"holds": eval_modal(model, args.at, phi)})
    return 0


def cmd_modal_valid(args) -> int:
    frame = load_frame(args.frame)
    phi = parse_modal(args.formula)
    ok, counter = frame_valid(frame, phi)
    doc = {"valid": ok}
    if counter is not None:
        cm, cw = counter
        doc["counter_world"] = cw
        doc["counter_valuation"] = {p: sorted(xs) for p, xs in cm.valuation}
    _emit(doc)
    return 0


def cmd_bisim(args) -> int:
    m1, m2 = _load_model(args.model1), _load_model(args.model2)
    m1.frame.check_vertices([args.at1])
    m2.frame.check_vertices([args.at2])
    _emit({"bisimilar": n_bisimilar(m1, args.at1, m2, args.at2, args.depth),
           "depth": args.depth})
    return 0


def cmd_fo_eval(args) -> int:
    frame = load_frame(args.frame)
    phi = parse_fo(args.formula)
    assignment = {}
    for item in args.let or []:
        if "=" not in item:
            raise InputError(f"--let expects var=vertex, got {item!r}")
        var, vert = item.split("=", 1)
        frame.check_vertices([vert])
        assignment[var] = vert
    _emit({"holds": eval_fo(frame, phi, assignment)})
    return 0


def cmd_fo_ef(args) -> int:
    f1, f2 = load_frame(args.frame1), load_frame(args.frame2)
    k = ef_min_rounds(f1, f2, args.max_rounds)
    _emit({"min_spoiler_rounds": k, "equivalent_up_to": args.max_rounds if k is None else k - 1})
    return 0


def cmd_fo_los_like(args) -> int:
    frame = load_frame(args.frame)
    frame.check_vertices([args.at])
    phi = parse_fo(args.formula)
    u = Ultrafilter(frame, args.at)
    ok, lhs, rhs = los_like_check(frame, phi, u)
    _emit({"agrees": ok, "extension_side": lhs, "membership_side": rhs})
    return 0


def cmd_hull(args) -> int:
    frame = load_frame(args.frame)
    frame.check_vertices([args.at])
    h = hull(frame, args.at, args.depth)
    doc = {
        "root": h.root,
        "depth": h.depth,
        "size": len(h.graph.vertices),
        "certificate": canonical_form(h).hex,
        "frame": frame_to_dict(h.graph),
    }
    if args.depth >= 1:
        doc["endpoints"] = sorted(endpoints(h))
    if args.formula:
        doc["formula"] = format_fo(hull_formula(h))
    _emit(doc)
    return 0


def cmd_census(args) -> int:
    fam = census_mod.load_family(args.family)
    c = census_mod.hull_census(fam, args.depth)
    _emit(census_mod.census_to_dict(c))
    return 0


def cmd_skeleton(args) -> int:
    fam = census_mod.load_family(args.family)
    sk = census_mod.ue_skeleton(fam, args.depth, args.budget)
    _emit({
        "frame": frame_to_dict(sk.frame),
        "provenance": sk.provenance,
        "census": census_mod.census_to_dict(sk.census),
    })
    return 0


def cmd_detect(args) -> int:
    fam = census_mod.load_family(args.family)
    if args.property == "reflexive":
        v = census_mod.reflexive_point_in_ue(fam, args.chi_threshold)
        _emit({"verdict": v.kind, "evidence": v.evidence, "data": v.data})
    elif args.property == "generated":
        v = census_mod.generated_substructure_verdict(fam)
        _emit({"verdict": v.kind, "evidence": v.evidence, "data": v.data})
    else:  # modal
        ok, report = census_mod.modal_logic_coincides(fam, args.depth, args.budget)
        _emit({"coincides": ok, "report": report})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uext", description="ultrafilter extension workbench")
    ap.add_argument("--jobs", type=int, default=1,
                    help="worker hint; results are deterministic regardless")
    ap.add_argument("--seed", type=int, default=0, help="seed hint for reproducibility")
    sub = ap.add_subparsers(dest="command", required=True)

    ue = sub.add_parser("ue", help="ultrafilter extension of a finite frame")
    uesub = ue.add_subparsers(dest="ue_command", required=True)
    p = uesub.add_parser("build")
    p.add_argument("frame")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_ue_build)
    p = uesub.add_parser("cross-check")
    p.add_argument("frame")
    p.set_defaults(func=cmd_ue_cross_check)

    modal = sub.add_parser("modal", help="modal evaluation and frame validity")
    msub = modal.add_subparsers(dest="modal_command", required=True)
    p = msub.add_parser("eval")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--at", required=True)
    p.set_defaults(func=cmd_modal_eval)
    p = msub.add_parser("valid")
    p.add_argument("frame")
    p.add_argument("formula")
    p.set_defaults(func=cmd_modal_valid)

    p = sub.add_parser("bisim", help="bounded bisimilarity of two pointed models")
    p.add_argument("model1")
    p.add_argument("model2")
    p.add_argument("--at1", required=True)
    p.add_argument("--at2", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=cmd_bisim)

    fo = sub.add_parser("fo", help="first order evaluation and games")
    fsub = fo.add_subparsers(dest="fo_command", required=True)
    p = fsub.add_parser("eval")
    p.add_argument("frame")
    p.add_argument("formula")
    p.add_argument("--let", action="append", metavar="var=vertex")
    p.set_defaults(func=cmd_fo_eval)
    p = fsub.add_parser("ef")
    p.add_argument("frame1")
    p.add_argument("frame2")
    p.add_argument("--max-rounds", type=int, default=4)
    p.set_defaults(func=cmd_fo_ef)
    p = fsub.add_parser("los-like")
    p.add_argument("frame")
    p.add_argument("formula")
    p.add_argument("--at", required=True)
    p.set_defaults(func=cmd_fo_los_like)

    p = sub.add_parser("hull", help="rooted n-hull of a vertex")
    p.add_argument("frame")
    p.add_argument("--at", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--formula", action="store_true")
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("census", help="hull-type census of a presented family")
    p.add_argument("family")
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("skeleton", help="truncated extension skeleton of a family")
    p.add_argument("family")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("detect", help="verdicts about a family's extension")
    p.add_argument("property", choices=["reflexive", "generated", "modal"])
    p.add_argument("family")
    p.add_argument("--chi-threshold", type=int, default=10)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_detect)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except DefectError as exc:
        print(f"defect: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
