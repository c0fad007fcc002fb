"""Command-line front end.

Exit codes: 0 success, 1 the checked property fails (not a sphere map,
inequivalent, ...), 2 usage or input error.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import documents as docs
from .constructions import nonalgebraic_pair, random_rational_sphere_map, random_sphere_map
from .errors import (
    InconsistencyError,
    NotASphereMapError,
    SphereMapError,
    ValidationError,
)
from .homotopy import polynomial_to_identity_path, rational_to_identity_path, verify_path
from .maps import (
    PolynomialSphereMap,
    reduce_lowest_terms,
    verify,
)
from .moduli import (
    constraint_residual,
    gram,
    moduli_dimension,
    moduli_tangent_rank,
    sample_moduli,
    unitarily_equivalent,
)
from .normalform import (
    check_normal_structure,
    classify_degree1,
    classify_degree2,
    equivalent_degree1,
    normal_form,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_tol():
    raw = os.environ.get("SPHEREMAP_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"SPHEREMAP_TOL={raw!r} is not a number") from None
    if not value > 0:
        raise ValidationError(f"SPHEREMAP_TOL must be positive, got {raw!r}")
    return value


def _witness(w):
    if w is None:
        return None
    out = {"theta": w.theta}
    if w.target_unitary is not None:
        out["target_unitary"] = np.asarray(w.target_unitary)
    return out


def _load_map(path):
    doc, raw = docs.read_document(path)
    try:
        return docs.parse_map_document(doc), raw
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _report(command, passed, digest, tol, **fields):
    out = {"command": command, "input_digest": digest, "passed": bool(passed), "tol": tol}
    out.update(fields)
    return out


# -- commands -----------------------------------------------------------------------


def cmd_verify(args):
    F, raw = _load_map(args.map)
    rep = verify(F, args.tol, args.samples)
    return _report(
        "verify",
        rep.is_sphere_map,
        docs.digest(raw),
        args.tol,
        degree=F.degree,
        residuals=rep.residuals,
        max_residual=rep.max_residual,
        circle_residual=rep.circle_residual,
    )


def cmd_gram(args):
    f, raw = _load_map(args.map)
    f = _require_polynomial(f)
    B = gram(f)
    res = constraint_residual(B)
    return _report(
        "gram",
        np.max(np.abs(res)) < args.tol,
        docs.digest(raw),
        args.tol,
        gram=B,
        residuals=res,
    )


def _require_polynomial(F):
    if isinstance(F, PolynomialSphereMap):
        return F
    F = reduce_lowest_terms(F)
    if not F.is_polynomial:
        raise ValidationError("this command needs a polynomial map")
    return F.as_polynomial()


def cmd_equiv(args):
    f, raw_f = _load_map(args.map)
    g, raw_g = _load_map(args.other)
    digest = docs.digest(raw_f, raw_g)
    for name, F in (("first", f), ("second", g)):
        rep = verify(F, args.tol)
        if not rep.is_sphere_map:
            raise NotASphereMapError(f"{name} map is not a sphere map (max residual {rep.max_residual:.3e})")
    polynomial = isinstance(f, PolynomialSphereMap) and isinstance(g, PolynomialSphereMap)
    if polynomial:
        w = unitarily_equivalent(f, g, args.tol)
        method = "gram"
    elif f.degree == 1 and g.degree == 1:
        w = equivalent_degree1(f, g, args.tol)
        method = "degree1_classification"
    else:
        raise ValidationError("rational maps are compared only in degree 1")
    fields = {"method": method, "witness": _witness(w)}
    if w is None:
        fields["message"] = "not *-equivalent" if polynomial else "not unitarily equivalent"
    return _report("equiv", w is not None, digest, args.tol, **fields)


def cmd_normal_form(args):
    f, raw = _load_map(args.map)
    f = _require_polynomial(f)
    nf = normal_form(f, args.tol, make_alpha_real=args.alpha_real)
    chk = check_normal_structure(nf, tol=max(args.tol, 1e-8))
    structure = {
        "zero_pattern": chk.zero_pattern,
        "diagonal": chk.diagonal,
        "alpha_consistency": chk.alpha_consistency,
        "identities": chk.identities,
        "trace": chk.trace,
    }
    for key in ("quadratic_relation", "linear_relation", "trace_relation"):
        if getattr(chk, key) is not None:
            structure[key] = getattr(chk, key)
    return _report(
        "normal-form",
        chk.passed,
        docs.digest(raw),
        args.tol,
        matrix=nf.A,
        parameters={
            "alpha": nf.alpha,
            "norm_A0": nf.norm_A0,
            "norm_Ad": nf.norm_Ad,
            "source_rotation": nf.source_rotation,
            "flags": list(nf.flags),
        },
        witnesses={"target_unitary": nf.target_unitary},
        residuals=structure,
    )


def cmd_classify(args):
    F, raw = _load_map(args.map)
    if F.degree == 1:
        params, w = classify_degree1(F, args.tol)
        family = "G"
        values = {"alpha": params.alpha, "r": params.r}
    elif F.degree == 2:
        params, w = classify_degree2(_require_polynomial(F), args.tol)
        family = "J"
        values = {"alpha": params.alpha, "beta": params.beta}
        if params.gamma is not None:
            values["gamma"] = params.gamma
    else:
        raise ValidationError(f"classification is available for degrees 1 and 2, got {F.degree}")
    values["flags"] = list(params.flags)
    return _report(
        "classify", True, docs.digest(raw), args.tol, family=family, parameters=values, witness=_witness(w)
    )


def cmd_homotopy(args):
    if not args.to_identity:
        raise ValidationError("homotopy needs --to-identity")
    F, raw = _load_map(args.map)
    N = args.dim or max(F.target_dim, 2)
    if args.polynomial:
        path = polynomial_to_identity_path(_require_polynomial(F), N)
    else:
        path = rational_to_identity_path(F, N)
    path_tol = max(args.tol, 1e-8)
    rep = verify_path(path, args.t_samples, args.samples, path_tol)
    if args.format == "csv":
        return rep.passed, docs.grid_csv(rep.rows)
    return _report(
        "homotopy",
        rep.passed,
        docs.digest(raw),
        path_tol,
        target_dim=N,
        depth=path.depth,
        segments=path.manifest(),
        residuals={
            "max_residual": rep.max_residual,
            "endpoint_error": rep.endpoint_error,
            "junction_errors": rep.junction_errors,
            "continuity_modulus": rep.continuity_modulus,
            "continuity_bound": rep.continuity_bound,
        },
        max_degree=rep.max_degree,
        failure=rep.failure,
    )


def cmd_sample(args):
    if args.degree is None:
        raise ValidationError("sample needs --degree")
    N = args.dim or args.degree + 1
    seed = 0 if args.seed is None else args.seed
    if args.rational:
        F = random_rational_sphere_map(args.degree, N, seed)
    else:
        F = random_sphere_map(args.degree, N, seed)
    meta = {"generator": "rational" if args.rational else "polynomial", "seed": str(seed)}
    return docs.map_to_document(F, meta)


def cmd_reduce(args):
    F, raw = _load_map(args.map)
    R = reduce_lowest_terms(F.as_rational())
    if R.is_polynomial:
        R = R.as_polynomial()
    meta = {"source_digest": docs.digest(raw), "cancelled_degree": str(F.degree - R.degree)}
    return docs.map_to_document(R, meta)


def cmd_moduli_dim(args):
    if args.map:
        f, raw = _load_map(args.map)
        B = gram(_require_polynomial(f))
        digest = docs.digest(raw)
    else:
        if args.degree is None:
            raise ValidationError("moduli-dim needs a map file or --degree")
        seed = 0 if args.seed is None else args.seed
        B = sample_moduli(args.degree, seed)
        digest = docs.digest("moduli-dim", args.degree, seed)
    d = B.shape[0] - 1
    rank = moduli_tangent_rank(B, max(args.tol, 1e-9))
    dim = moduli_dimension(B, max(args.tol, 1e-9))
    return _report(
        "moduli-dim", rank == 2 * d + 1, digest, args.tol, degree=d, rank=rank, dimension=dim, expected_dimension=d * d
    )


def cmd_demo_nonalgebraic(args):
    pair = nonalgebraic_pair(args.order)
    return _report(
        "demo-nonalgebraic",
        pair.sup_residual < args.tol,
        docs.digest("demo-nonalgebraic", args.order),
        args.tol,
        order=pair.M,
        f1=pair.f1_description,
        sup_residual=pair.sup_residual,
        log10_residual=pair.log10_residual if math.isfinite(pair.log10_residual) else None,
        max_abs_f1=pair.max_abs_f1,
        samples=pair.samples,
        decimal_digits=pair.dps,
        taylor_head=pair.taylor_head,
    )


COMMANDS = {
    "verify": cmd_verify,
    "gram": cmd_gram,
    "equiv": cmd_equiv,
    "normal-form": cmd_normal_form,
    "classify": cmd_classify,
    "homotopy": cmd_homotopy,
    "sample": cmd_sample,
    "reduce": cmd_reduce,
    "moduli-dim": cmd_moduli_dim,
    "demo-nonalgebraic": cmd_demo_nonalgebraic,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-9 or $SPHEREMAP_TOL)")
    common.add_argument("--samples", type=int, default=64, help="circle samples per t value")
    common.add_argument("--t-samples", type=int, default=21, help="t samples for homotopy grids")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--degree", type=int, default=None)
    common.add_argument("--dim", type=int, default=None, help="target dimension N")
    common.add_argument("--output", "-o", default=None, help="write here instead of standard output")
    common.add_argument("--format", choices=["json", "csv"], default=None)

    parser = _Parser(prog="spheremaps", description="Rational sphere maps: checks, invariants and homotopies.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("verify", "gram", "normal-form", "classify", "reduce"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("map", help="MapDocument JSON file")
        if name == "normal-form":
            p.add_argument("--alpha-real", action="store_true", help="rotate the source so alpha is real")
    p = sub.add_parser("equiv", parents=[common])
    p.add_argument("map")
    p.add_argument("other")
    p = sub.add_parser("homotopy", parents=[common])
    p.add_argument("map")
    p.add_argument("--to-identity", action="store_true", help="build a path to z (+) 0")
    p.add_argument("--polynomial", action="store_true", help="stay inside polynomial maps")
    p = sub.add_parser("sample", parents=[common])
    p.add_argument("--rational", action="store_true", help="rational proper map instead of polynomial")
    p = sub.add_parser("moduli-dim", parents=[common])
    p.add_argument("map", nargs="?")
    p = sub.add_parser("demo-nonalgebraic", parents=[common])
    p.add_argument("--order", type=int, default=64, help="truncation order M")
    return parser


def _emit(text, output):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None):
    """Parse ``argv``, run the command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.tol is None:
            args.tol = _default_tol()
        if args.format is None:
            args.format = "csv" if args.command == "homotopy" else "json"
        if args.format == "csv" and args.command != "homotopy":
            raise ValidationError("--format csv is only available for homotopy grids")
        for name in ("samples", "t_samples"):
            if getattr(args, name) < 2:
                raise ValidationError(f"--{name.replace('_', '-')} must be at least 2")
        result = COMMANDS[args.command](args)
    except NotASphereMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except InconsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SphereMapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, tuple):
        passed, text = result
        _emit(text, args.output)
        return EXIT_OK if passed else EXIT_FAIL
    _emit(docs.dumps(result), args.output)
    return EXIT_OK if result.get("passed", True) else EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
