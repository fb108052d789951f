"""Command-line front end.

Exit codes: 0 success, 1 contract or validation failure, 2 input error,
3 unsupported feature.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .entropy import entropy_report, fmt, format_report, report_csv
from .model import (
    TOL,
    AnyonModel,
    ModelError,
    ModelSyntaxError,
    axiom_residuals,
    builtin_model,
    model_from_dict,
    serialize_model,
)
from .ops import (
    AnyonicState,
    BasisDescriptor,
    GeometryError,
    SystemGeometry,
    change_basis,
    change_state_basis,
    density_matrix,
)
from .reduce import REGIONS, ReductionError, UnsupportedTopology, plan_reduction, reduced_density_matrix
from .tree import TreeError, enumerate_labellings, permute_by_word

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


# --- loading ------------------------------------------------------------------------


def _load_model(arg: str, verify: bool = True) -> AnyonModel:
    """A model file path or a built-in name."""
    path = Path(arg)
    if path.exists():
        doc = io.read_json(path, "model file")
        return model_from_dict(doc, verify=verify)
    try:
        return builtin_model(arg)
    except ModelError:
        raise CliError(f"no model file or built-in model named {arg!r}") from None


def _load_system(args) -> SystemGeometry:
    model = _load_model(args.model) if getattr(args, "model", None) else None
    if not args.system:
        raise CliError("--system is required")
    return io.system_from_dict(io.read_json(args.system, "system file"), model)


def _load_rho(args, system):
    if not args.state:
        raise CliError("--state is required")
    obj = io.document_from_dict(io.read_json(args.state, "state file"), system)
    if isinstance(obj, AnyonicState):
        if abs(np.linalg.norm(obj.amp) - 1) > 1e-8:
            obj = obj.normalized()
        return density_matrix(obj)
    if not obj.is_full_system:
        raise CliError("expected a full-system state or density matrix")
    return obj


def _load_part(args, system):
    if not args.bipartition:
        raise CliError("--bipartition is required")
    return io.bipartition_from_dict(io.read_json(args.bipartition, "bipartition file"), system)


def _sector_name(model):
    return lambda sector: ",".join(model.label(c) for c in sector)


def _word_text(word) -> str:
    return ",".join(str(i * s) for i, s in word) or "-"


def _orders(text):
    if not text:
        return ()
    try:
        out = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise CliError(f"invalid --renyi list {text!r}") from None
    if any(n <= 0 for n in out):
        raise CliError("Renyi orders must be positive")
    return out


# --- subcommands ----------------------------------------------------------------------


def cmd_model_check(args, out) -> int:
    target = args.path or args.model
    if not target:
        raise CliError("model check needs a model file or built-in name")
    model = _load_model(target, verify=False)
    res = axiom_residuals(model)
    width = max(len(k) for k in res)
    failed = [k for k, v in res.items() if not v < TOL]
    out.write(f"model: {model.name}\n")
    for k, v in res.items():
        out.write(f"{k.ljust(width)}  {fmt(v)}  {'ok' if v < TOL else 'FAIL'}\n")
    if failed:
        out.write(f"status: FAIL ({', '.join(failed)})\n")
        return EXIT_FAIL
    out.write("status: ok\n")
    return EXIT_OK


def cmd_model_export(args, out) -> int:
    try:
        model = builtin_model(args.name, args.parameter)
    except ModelError as err:
        raise CliError(str(err)) from None
    out.write(serialize_model(model))
    return EXIT_OK


def cmd_basis_enum(args, out) -> int:
    system = _load_system(args)
    if args.word:
        word = io.parse_word(args.word or "")
        order = permute_by_word(system.ids, word)
        basis = BasisDescriptor(order, word).validate(system)
    else:
        basis = system.default_basis()
    shape = system.shape(basis.tree_order)
    labels = enumerate_labellings(system.model, shape)
    out.write(f"tree_order: {' '.join(basis.tree_order)}\n")
    out.write(f"dimension: {len(labels)}\n")
    for k, lab in enumerate(labels):
        out.write(f"{k}\t{io.format_labelling(system.model, shape, lab)}\n")
    return EXIT_OK


def cmd_braid_apply(args, out) -> int:
    """Re-express the state in the basis reached by appending a braid word to its descriptor."""
    system = _load_system(args)
    obj = io.document_from_dict(io.read_json(args.state, "state file"), system)
    word = io.parse_word(args.word)
    basis = obj.basis
    try:
        target = BasisDescriptor(permute_by_word(basis.tree_order, word), basis.word + word)
        target = target.validate(system)
    except (TreeError, GeometryError) as err:
        raise CliError(str(err)) from None
    if isinstance(obj, AnyonicState):
        out.write(io.serialize(change_state_basis(obj, target)))
    else:
        out.write(io.serialize(change_basis(obj, target)))
    return EXIT_OK


def _keep(args):
    keep = args.keep or "A"
    if keep not in REGIONS:
        raise CliError("--keep must be A or B")
    return keep


def cmd_reduce(args, out) -> int:
    system = _load_system(args)
    rho = _load_rho(args, system)
    part = _load_part(args, system)
    rho_A = reduced_density_matrix(rho, part, _keep(args))
    out.write(io.serialize(rho_A))
    return EXIT_OK


def cmd_entropy(args, out) -> int:
    system = _load_system(args)
    rho = _load_rho(args, system)
    part = _load_part(args, system)
    keep = _keep(args)
    orders = _orders(args.renyi)
    plan = plan_reduction(system, rho.basis, part, keep)
    report = entropy_report(reduced_density_matrix(rho, part, keep, plan), orders)
    name = _sector_name(system.model)
    out.write(f"region: {keep} ({' '.join(part.region(keep))})\n")
    out.write(f"embed_word: {_word_text(plan.embed_word)}\n")
    out.write(format_report(report, name))
    if args.csv:
        Path(args.csv).write_text(report_csv(report, name))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from .oracle import CORPUS_MODELS, check_defining_property, trial_corpus

    if not args.state:
        if not args.model or args.model not in CORPUS_MODELS:
            raise CliError(f"random verification needs --model in {', '.join(CORPUS_MODELS)}")
        worst = 0.0
        trials = trial_corpus(args.model, args.trials, args.seed)
        for tr in trials:
            rho_A = reduced_density_matrix(tr.rho, tr.part, tr.keep)
            worst = max(worst, check_defining_property(tr.rho, rho_A, tr.part, tr.keep))
        out.write(f"model: {args.model}  trials: {len(trials)}  seed: {args.seed}\n")
        out.write(f"max deviation: {fmt(worst)}\n")
        ok = worst < TOL
        out.write(f"status: {'ok' if ok else 'FAIL'}\n")
        return EXIT_OK if ok else EXIT_FAIL
    system = _load_system(args)
    rho = _load_rho(args, system)
    part = _load_part(args, system)
    regions = (args.keep,) if args.keep else REGIONS
    if args.reduced:
        if len(regions) != 1:
            raise CliError("--reduced needs --keep")
        precomputed = io.document_from_dict(io.read_json(args.reduced, "reduced operator file"), system)
    worst = 0.0
    for r in regions:
        rho_A = precomputed if args.reduced else reduced_density_matrix(rho, part, r)
        dev = check_defining_property(rho, rho_A, part, r)
        out.write(f"region {r}: max deviation {fmt(dev) if np.isfinite(dev) else 'inf'}\n")
        worst = max(worst, dev)
    ok = worst < TOL
    out.write(f"status: {'ok' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAIL


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anyent", description="Entanglement of anyonic systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state=True, part=True):
        sp.add_argument("--model", help="model file or built-in name (if the system names none)")
        sp.add_argument("--system", help="system document")
        if state:
            sp.add_argument("--state", help="state or density-matrix document")
        if part:
            sp.add_argument("--bipartition", help="bipartition document")
            sp.add_argument("--keep", choices=REGIONS, help="region to keep (default A)")

    model = sub.add_parser("model", help="model files").add_subparsers(dest="action", required=True)
    mc = model.add_parser("check", help="check the category axioms of a model")
    mc.add_argument("path", nargs="?", help="model file or built-in name")
    mc.add_argument("--model", help="model file or built-in name")
    mc.set_defaults(func=cmd_model_check)
    me = model.add_parser("export", help="write a built-in model as a document")
    me.add_argument("name")
    me.add_argument("--parameter", type=int)
    me.set_defaults(func=cmd_model_export)

    basis = sub.add_parser("basis", help="fusion-tree bases").add_subparsers(dest="action", required=True)
    be = basis.add_parser("enum", help="list labellings of a system")
    common(be, state=False, part=False)
    be.add_argument("--word", help="braid word from the reference order, e.g. 3,-2")
    be.set_defaults(func=cmd_basis_enum)

    braid = sub.add_parser("braid", help="braid words").add_subparsers(dest="action", required=True)
    ba = braid.add_parser("apply", help="re-express a state after appending a braid word")
    common(ba, part=False)
    ba.add_argument("--word", required=True, help="signed generator positions, e.g. 3,3,-2")
    ba.set_defaults(func=cmd_braid_apply)

    rd = sub.add_parser("reduce", help="reduced density matrix of one region")
    common(rd)
    rd.set_defaults(func=cmd_reduce)

    en = sub.add_parser("entropy", help="entanglement spectrum and entropies")
    common(en)
    en.add_argument("--renyi", help="comma-separated Renyi orders, e.g. 0.5,2,3")
    en.add_argument("--csv", help="also write the report as CSV")
    en.set_defaults(func=cmd_entropy)

    vf = sub.add_parser("verify", help="check reduced density matrices against their definition")
    common(vf)
    vf.add_argument("--reduced", help="precomputed reduced operator document to check")
    vf.add_argument("--seed", type=int, default=0, help="seed for random trials (without --state)")
    vf.add_argument("--trials", type=int, default=200, help="number of random trials")
    vf.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except ModelSyntaxError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (io.UnsupportedFeature, UnsupportedTopology) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_UNSUPPORTED
    except CliError as exc:
        err.write(f"error: {exc}\n")
        return exc.code
    except (io.DocumentError, ModelError, GeometryError, TreeError, ReductionError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
