"""Command line front end.

Commands operate on a pair or chain specification file (JSON) and print
deterministic JSON or plain text.  Exit status: 0 on success, 2 on a
validation error in the input, 1 on an internal computational error.
"""

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .broken import enumerate_broken_lines, lift, check_consistency
from .classes import DegreeFunctional
from .cyclic import (ChainPair, ChainSpec, dual_singularity_type,
                     family_equations, p_resolution)
from .scattering import (extract_invariants, initial_diagram,
                         pull_back_canonical, scatter_complete)
from .theta import (ORIGIN, canonical_point, chart_equation, find_relations,
                    multiply_expand, structure_constants)
from .tropical import (PairError, PairSpec, build_pair, looijenga_check,
                       model_factorization)

COMMANDS = ("classify", "monodromy", "factorize", "scatter", "diagram",
            "lift", "product", "relations", "charts", "cyclic", "invariants")


def _load_spec(path):
    with open(path) as fh:
        return json.load(fh)


def _fmt_class(lattice, cls, style):
    if style == "json":
        return lattice.serialize(cls)
    tor, exc = cls
    bits = []
    for i, a in enumerate(tor):
        if a:
            bits.append("%+d*Dbar%d" % (a, i))
    for k, (i, j) in enumerate(lattice.exc_pairs):
        if exc[k]:
            bits.append("%+d*E%d%d" % (exc[k], i, j))
    body = " ".join(bits) if bits else "0"
    try:
        d, e = lattice.to_boundary_presentation(cls)
        bbits = []
        for i, a in enumerate(d):
            if a:
                bbits.append("%+d*D%d" % (a, i))
        for k, (i, j) in enumerate(lattice.exc_pairs):
            if e[k]:
                bbits.append("%+d*E%d%d" % (e[k], i, j))
        boundary = " ".join(bbits) if bbits else "0"
        return "%s  (= %s)" % (body, boundary)
    except ValueError:
        return body


def _fmt_element(lattice, elt, style):
    if style == "json":
        return elt.serialize()
    bits = []
    for (m, cls), c in elt.sorted_items():
        bits.append("%s * z^[%s] * X^%s" % (c, _fmt_class(lattice, cls, "text"),
                                            (m,)))
    return " + ".join(bits) if bits else "0"


def _point_arg(text):
    data = json.loads(text)
    return (int(data[0]), (int(data[1][0]), int(data[1][1])))


def _endpoint_arg(text):
    data = json.loads(text)
    return (int(data[0]), (Fraction(str(data[1][0])),
                           Fraction(str(data[1][1]))))


def _emit(payload, fmt):
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, indent=1, sort_keys=True))
        sys.stdout.write("\n")
    else:
        for line in payload if isinstance(payload, list) else [payload]:
            sys.stdout.write(str(line))
            sys.stdout.write("\n")


def main(argv=None):
    ap = argparse.ArgumentParser(prog="logcy", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--spec", required=True, help="JSON specification file")
    ap.add_argument("--order", type=int, default=2, help="truncation order k")
    ap.add_argument("--format", choices=("json", "text", "plotdata"),
                    default="text")
    ap.add_argument("--epsilon", default=None,
                    help="truncation weight of exceptional classes, as P/Q")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--q", default=None, help='direction, e.g. "[0,[1,0]]"')
    ap.add_argument("--endpoint", default=None,
                    help='endpoint, e.g. "[0,[7,2]]"')
    ap.add_argument("--endpoint2", default=None)
    ap.add_argument("--points", default=None,
                    help='list of directions for `product`')
    ap.add_argument("--ray", type=int, default=None, help="ray index")
    ap.add_argument("--version", action="version", version=__version__)
    args = ap.parse_args(argv)
    try:
        data = _load_spec(args.spec)
        if args.order < 1:
            raise PairError("order must be >= 1")
        if args.command == "cyclic":
            return _run_cyclic(args, data)
        return _run_pair(args, data)
    except (PairError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write("validation error: %s\n" % (exc,))
        return 2
    except (AssertionError, RuntimeError) as exc:
        sys.stderr.write("internal error: %s\n" % (exc,))
        return 1


def _canonical(pair, args):
    eps = Fraction(args.epsilon) if args.epsilon else None
    functional = DegreeFunctional(pair, epsilon=eps)
    init = initial_diagram(pair, functional, args.order)
    completed = scatter_complete(init)
    return functional, completed, pull_back_canonical(completed)


def _run_pair(args, data):
    spec = PairSpec.from_dict(data)
    pair = build_pair(spec)
    cmd = args.command
    if cmd == "classify":
        verdict, witness = pair.classify_boundary(with_witness=True)
        out = {"classification": verdict}
        if witness is not None:
            out["positive_square_witness"] = witness
        _emit(out if args.format == "json" else
              ["classification: %s" % verdict] +
              (["witness: %r" % (witness,)] if witness else []), args.format)
        return 0
    if cmd == "monodromy":
        t = pair.monodromy()
        payload = {"monodromy": [list(r) for r in t],
                   "self_intersections": pair.self_int,
                   "classification": pair.classify_boundary()}
        _emit(payload if args.format == "json" else
              ["T = %r (basis v_0, v_1)" % (t,),
               "D^2 = %r" % (pair.self_int,)], args.format)
        return 0
    if cmd == "factorize":
        t = pair.monodromy()
        from .lattice import mat_inv
        factors = model_factorization(pair)
        ok = looijenga_check(mat_inv(t), factors)
        payload = {"t_inverse": [list(r) for r in mat_inv(t)],
                   "factors": [{"w": list(w), "n": n} for w, n in factors],
                   "valid": ok}
        _emit(payload if args.format == "json" else
              ["T^-1 = %r" % (mat_inv(t),)] +
              ["  shear w=%r n=%d" % (w, n) for w, n in factors] +
              ["product matches: %s" % ok], args.format)
        return 0

    functional, completed, canonical = _canonical(pair, args)
    lattice = functional.lattice
    if cmd in ("scatter", "diagram"):
        diagram = completed if cmd == "scatter" else canonical
        if args.format == "plotdata":
            rows = []
            for w in diagram.walls:
                if diagram.side == "Bbar":
                    end = w.support
                else:
                    end = pair.nu_point_to_plane(w.support[0], w.support[1])
                rows.append("ray\t%s\t%s\t%s" % (end[0], end[1],
                                                 w.orientation))
            _emit(rows, "text")
            return 0
        payload = {"order": args.order, "side": diagram.side,
                   "walls": diagram.serialize()}
        _emit(payload if args.format == "json" else
              ["%s wall support=%r:" % (w.orientation, w.support)
               for w in diagram.walls] +
              ["  (use --format json for functions)"], args.format)
        return 0
    if cmd == "lift":
        q = _point_arg(args.q)
        endpoint = _endpoint_arg(args.endpoint)
        value = lift(pair, canonical, q, endpoint, args.order)
        lines = enumerate_broken_lines(pair, canonical, q, endpoint,
                                       args.order)
        payload = {"lift": value.serialize(),
                   "broken_lines": [bl.serialize(lattice) for bl in lines]}
        if args.endpoint2:
            other = _endpoint_arg(args.endpoint2)
            payload["consistent"] = check_consistency(
                pair, canonical, q, endpoint, other, args.order)
        _emit(payload if args.format == "json" else
              ["Lift = %s" % _fmt_element(lattice, value, "text"),
               "lines: %d" % len(lines)] +
              (["consistent: %s" % payload["consistent"]]
               if "consistent" in payload else []), args.format)
        return 0
    if cmd == "product":
        pts = [(int(p[0]), (int(p[1][0]), int(p[1][1])))
               for p in json.loads(args.points)]
        out = multiply_expand(pair, canonical, pts, args.order)
        payload = [{"point": "origin" if r == ORIGIN else [r[0], list(r[1])],
                    "coeff": a.serialize()} for r, a in out.sorted_items()]
        _emit(payload if args.format == "json" else
              ["theta_%r : %s" % (r, _fmt_element(lattice, a, "text"))
               for r, a in out.sorted_items()], args.format)
        return 0
    if cmd == "relations":
        rels = find_relations(pair, canonical, args.order)
        if args.format == "json":
            _emit([rel.serialize(lattice) for rel in rels], "json")
            return 0
        lines = []
        for rel in rels:
            rhs = []
            for r, a in sorted(rel.alphas.items(), key=str):
                name = "1" if r == ORIGIN else "theta[%d,%r]" % (r[0], r[1])
                rhs.append("(%s)*%s" % (_fmt_element(lattice, a, "text"),
                                        name))
            lines.append("theta[%d,%r] * theta[%d,%r] = %s"
                         % (rel.p[0], rel.p[1], rel.q[0], rel.q[1],
                            " + ".join(rhs)))
        _emit(lines, "text")
        return 0
    if cmd == "charts":
        rows = []
        for i in range(pair.n):
            eq = chart_equation(pair, canonical, i, args.order)
            rows.append({
                "ray": eq["ray"], "dsq": eq["dsq"],
                "class_D": lattice.serialize(eq["class_D"]),
                "f": eq["f"].serialize(),
            } if args.format == "json" else
                "ray %d: X- X+ = z^[%s] X^%d (%s)"
                % (i, _fmt_class(lattice, eq["class_D"], "text"), -eq["dsq"],
                   _fmt_element(lattice, eq["f"], "text")))
        _emit(rows, args.format)
        return 0
    if cmd == "invariants":
        rows = []
        for w in canonical.walls:
            data = extract_invariants(w)
            rows.append({
                "support": {"cone": w.support[0],
                            "coords": list(w.support[1])},
                "log_terms": [{"class": lattice.serialize(cls),
                               "kN": str(c)} for cls, c in data],
            } if args.format == "json" else
                "wall %r: %s" % (w.support,
                                 ", ".join("kN[%s] = %s"
                                           % (_fmt_class(lattice, cls, "text"),
                                              c) for cls, c in data)))
        _emit(rows, args.format)
        return 0
    raise PairError("unhandled command %r" % (cmd,))


def _run_cyclic(args, data):
    chain = ChainPair(ChainSpec.from_dict(data))
    eqs = family_equations(chain)
    dual = dual_singularity_type(chain) if any(chain.blowups) else None
    res = p_resolution(chain) if any(chain.blowups) else None
    if args.format == "json":
        payload = {"equations": [{"i": e["i"], "exponent": e["exponent"],
                                  "l": e["l"], "text": e["text"]}
                                 for e in eqs]}
        if dual is not None:
            payload["dual_type"] = {"r": dual[0], "a": dual[1]}
            payload["p_resolution"] = res.serialize()
        _emit(payload, "json")
        return 0
    lines = [e["text"] for e in eqs]
    if dual is not None:
        lines.append("dual singularity: 1/%d(1,%d)" % dual)
        lines.append("P-resolution: %s" % (res.serialize(),))
    _emit(lines, "text")
    return 0


if __name__ == "__main__":
    sys.exit(main())
