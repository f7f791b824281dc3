"""Command-line front end.

Exit codes: 0 success, 1 failed validation or an infeasible request on
well-formed input, 2 malformed input or bad usage. All file output is
written atomically and is byte-identical across reruns of the same
command on the same input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__, limits
from ._accel import active_backend, force_backend
from .decomposition import DEFAULT_OVERLAP_TOL, irreducible_components
from .ensemble import (
    Ensemble,
    apply_product_unitary,
    cnot_unitary,
    ensemble_from_json,
    load_ensemble,
)
from .errors import EacompError, EnsembleFormatError
from .iepsilon import IsometrySearchConfig, check_lemma_properties, estimate_grid, i_zero_bounds
from .rates import (
    classical_entanglement_corner,
    entropy_profile,
    optimal_rates,
    blind_rates,
    visible_rates,
)
from .region import boundary_polyline, ce_region, eq_region, polyline_csv
from .schumacher import fidelity_curve


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".eacomp-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out_path: str | None):
    if out_path:
        _atomic_write(out_path, text)
    else:
        sys.stdout.write(text)


def _dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load(args) -> Ensemble:
    e = load_ensemble(args.ensemble)
    if getattr(args, "apply_cnot", False):
        e = apply_product_unitary(e, cnot_unitary())
    pre = getattr(args, "pre_unitary", None)
    if pre:
        with open(pre, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        u = np.array([[complex(v[0], v[1]) for v in row] for row in raw], dtype=np.complex128)
        e = apply_product_unitary(e, u)
    return e


def _apply_limits(args):
    if args.vector_cap is not None:
        limits.VECTOR_CAP = args.vector_cap
    if args.matrix_cap is not None:
        limits.MATRIX_CAP = args.matrix_cap
    if args.sequence_cap is not None:
        limits.SEQUENCE_CAP = args.sequence_cap
    if args.code_dim_cap is not None:
        limits.CODE_DIM_CAP = args.code_dim_cap
    if getattr(args, "backend", "auto") != "auto":
        force_backend(args.backend)


def cmd_validate(args) -> int:
    try:
        e = load_ensemble(args.ensemble)
    except EnsembleFormatError as exc:
        for line in exc.violations:
            print(line, file=sys.stderr)
        return 1
    kind = "blind" if e.is_blind(args.tol) else ("visible" if e.is_visible(args.tol) else "general")
    print(f"ok: {e.size} states, dimA={e.dim_a}, dimC={e.dim_c}, {kind}")
    return 0


def cmd_decompose(args) -> int:
    e = _load(args)
    d = irreducible_components(e, args.tol)
    report = d.to_json()
    report["input"] = args.ensemble
    _emit(_dump_json(report), args.output)
    return 0


def cmd_rates(args) -> int:
    e = _load(args)
    profile = entropy_profile(e, args.tol)
    d = irreducible_components(e, args.tol)
    report = {
        "schema_version": 1,
        "input": args.ensemble,
        "tolerance": args.tol,
        "entropy_profile": profile.to_json(),
        "decomposition": {
            "num_components": d.size,
            "weights": [c.weight for c in d.components],
        },
        "rates": {
            "optimal": optimal_rates(e, args.tol).to_json(),
            "unassisted": {"Q": profile.to_json()["S_A"], "note": "no shared entanglement"},
        },
    }
    if e.is_blind(args.tol):
        report["rates"]["blind"] = blind_rates(e, args.tol).to_json()
        report["rates"]["classical_corner"] = classical_entanglement_corner(e, args.tol).to_json()
    if e.is_visible(args.tol):
        report["rates"]["visible"] = visible_rates(e, args.tol).to_json()
    _emit(_dump_json(report), args.output)
    return 0


def cmd_region(args) -> int:
    e = _load(args)
    if args.kind == "EQ":
        spec = eq_region(e, args.tol)
        header = ("E", "Q")
    else:
        spec = ce_region(e, args.tol)
        header = ("C", "E")
    points = boundary_polyline(spec, lo=args.lo, hi=args.hi, samples=args.samples)
    _emit(polyline_csv(points, header), args.output)
    spec_out = args.spec_out
    if spec_out is None and args.output:
        root, _ = os.path.splitext(args.output)
        spec_out = root + ".json"
    if spec_out:
        _atomic_write(spec_out, _dump_json(spec.to_json()))
    return 0


def cmd_simulate(args) -> int:
    e = _load(args)
    ns = [int(v) for v in args.n.split(",") if v.strip()]
    if not ns or any(n < 1 for n in ns):
        print("--n needs a comma-separated list of positive integers", file=sys.stderr)
        return 2
    curve = fidelity_curve(e, ns, args.rate)
    for w in curve.warnings:
        print(f"skipped {w}", file=sys.stderr)
    _emit(curve.csv(), args.output)
    return 0


def cmd_iepsilon(args) -> int:
    e = _load(args)
    eps_grid = sorted(float(v) for v in args.eps.split(",") if v.strip())
    if not eps_grid:
        print("--eps needs a comma-separated list of values in [0, 1]", file=sys.stderr)
        return 2
    config = IsometrySearchConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        penalty=args.penalty,
        env_dim=args.env_dim,
        env_cap=args.env_cap,
        seed=args.seed,
    )
    floor, ceiling = i_zero_bounds(e, args.tol)
    report = {
        "schema_version": 1,
        "input": args.ensemble,
        "backend": active_backend(),
        "config": config.to_json(),
        "bounds": {"floor_I_X_C": floor, "ceiling_S_CY": ceiling},
    }
    if args.check_lemma:
        lemma = check_lemma_properties(e, eps_grid, config, args.tol)
        report["estimates"] = [
            {"eps": g, "estimate": v} for g, v in zip(lemma.eps_grid, lemma.estimates)
        ]
        report["lemma_checks"] = lemma.to_json()
    else:
        ests = estimate_grid(e, eps_grid, config)
        report["estimates"] = [est.to_json() for est in ests]
    _emit(_dump_json(report), args.output)
    return 0


def _add_common(p: argparse.ArgumentParser, output=True):
    p.add_argument("ensemble", help="path to an ensemble JSON file")
    p.add_argument("--tol", type=float, default=DEFAULT_OVERLAP_TOL,
                   help="overlap tolerance for the component graph (default %(default)s)")
    if output:
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    p.add_argument("--vector-cap", type=int, default=None, help="override the state-vector size cap")
    p.add_argument("--matrix-cap", type=int, default=None, help="override the density-matrix side cap")
    p.add_argument("--sequence-cap", type=int, default=None, help="override the sequence-enumeration cap")
    p.add_argument("--code-dim-cap", type=int, default=None, help="override the block-dimension cap")


def _add_preprocess(p: argparse.ArgumentParser):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--apply-cnot", action="store_true",
                       help="rewrite signals under a CNOT from A onto C before the computation")
    group.add_argument("--pre-unitary", default=None, metavar="FILE",
                       help="JSON matrix of [re, im] pairs applied on A(x)C before the computation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eacomp",
        description="Optimal compression rates for pure-state sources with encoder side information",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an ensemble file, print violations")
    p.add_argument("ensemble")
    p.add_argument("--tol", type=float, default=DEFAULT_OVERLAP_TOL)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("decompose", help="irreducible components of the source")
    _add_common(p)
    _add_preprocess(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("rates", help="entropy profile and optimal rates")
    _add_common(p)
    _add_preprocess(p)
    p.set_defaults(fn=cmd_rates)

    p = sub.add_parser("region", help="boundary polyline of an achievable region")
    _add_common(p)
    _add_preprocess(p)
    p.add_argument("--kind", choices=("EQ", "CE"), required=True,
                   help="EQ: qubit/ebit region; CE: classical/ebit region (blind sources)")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--spec-out", default=None,
                   help="where to write the region constraints as JSON "
                        "(default: alongside -o with a .json extension)")
    p.set_defaults(fn=cmd_region)

    p = sub.add_parser("simulate", help="finite-blocklength fidelity of typical-subspace coding")
    _add_common(p)
    _add_preprocess(p)
    p.add_argument("--rate", type=float, required=True, help="qubit rate Q")
    p.add_argument("--n", required=True, help="comma-separated block lengths")
    p.add_argument("--backend", choices=("auto", "numpy", "numba"), default="auto")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("iepsilon", help="certified lower bounds on extractable label information")
    _add_common(p)
    _add_preprocess(p)
    p.add_argument("--eps", required=True, help="comma-separated disturbance levels in [0, 1]")
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--penalty", type=float, default=64.0)
    p.add_argument("--env-dim", type=int, default=None)
    p.add_argument("--env-cap", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-lemma", action="store_true",
                   help="also run the monotonicity/bounds diagnostics")
    p.add_argument("--backend", choices=("auto", "numpy", "numba"), default="auto")
    p.set_defaults(fn=cmd_iepsilon)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command != "validate":
            _apply_limits(args)
        return args.fn(args)
    except json.JSONDecodeError as exc:
        print(f"malformed JSON: {exc}", file=sys.stderr)
        return 2
    except EnsembleFormatError as exc:
        for line in exc.violations:
            print(line, file=sys.stderr)
        return 1
    except EacompError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
