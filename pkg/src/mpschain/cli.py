"""Command-line front end for classification, chain building, states,
contraction, verification, and parameter sweeps.

Exit codes: 0 success, 2 input validation failure, 3 the computation
itself failed (for example an uncatalogued space), 4 a zero-energy
claim check did not meet tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys

import numpy as np

from . import serialize
from .classify import ClassificationError, classify, invariant_signature
from .hamiltonian import (FamilyParams, build_family, full_chain,
                          params_from_mapping)
from .states import (MPSSpec, NoRepresentationError, ground_state_catalogue,
                     mps_contract)
from .verify import MEMBER_TOL, family_report

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_CLAIM = 4

_GRID_RE = re.compile(
    r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r":(?P<lo>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"\.\.(?P<hi>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r":(?P<count>\d+)$")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _decode_params(family: str, mapping) -> FamilyParams:
    """JSON parameter object to FamilyParams; [re, im] pairs become
    complex, everything else must be a plain number."""
    if not isinstance(mapping, dict):
        raise serialize.FormatError("--params must be a JSON object")
    converted = {}
    for key, value in mapping.items():
        if key == "lambda3":
            converted[key] = serialize.decode_matrix(value)
        elif isinstance(value, list):
            converted[key] = serialize.decode_complex(value)
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            converted[key] = value
        else:
            raise serialize.FormatError(
                f"parameter {key!r}: expected a number or [re, im] pair")
    return params_from_mapping(family, converted)


def _parse_params_arg(args) -> FamilyParams:
    try:
        mapping = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise serialize.FormatError(f"--params is not valid JSON: {exc}")
    return _decode_params(args.family, mapping)


def _report_payload(report) -> dict:
    return {
        "n_sites": report.n_sites,
        "ground_energy": report.ground_energy,
        "kernel_dim": report.kernel_dim,
        "lowest_k_eigenvalues": list(report.lowest_k_eigenvalues),
        "residuals": {label: float(r)
                      for label, r in sorted(report.residuals.items())},
        "warning": report.warning,
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_classify(args) -> int:
    data = json.loads(_read_text(args.space))
    space = serialize.decode_space(data)
    result = classify(space)
    sig = invariant_signature(space)
    mu = result.form.mu
    payload = {
        "case_id": result.form.case_id.value,
        "mu": serialize.encode_complex(mu) if mu is not None else None,
        "gamma": serialize.encode_matrix(result.gamma.matrix),
        "canonical_basis": serialize.encode_space(result.canonical),
        "signature": {
            "dim": sig.dim,
            "dim_plus": sig.dim_plus,
            "gram_rank": sig.gram_rank,
            "sigma_in": sig.sigma_in,
        },
    }
    _emit_text(serialize.dumps(payload), args.out)
    return EXIT_OK


def _cmd_build_h(args) -> int:
    params = _parse_params_arg(args)
    chain = full_chain(build_family(params), args.n_sites)
    if args.binary:
        if args.out is None or args.out == "-":
            raise serialize.FormatError("--binary requires --out FILE")
        with open(args.out, "wb") as fh:
            fh.write(serialize.pack_chain(chain.n_sites, chain.matrix))
        return EXIT_OK
    payload = {
        "n_sites": chain.n_sites,
        "matrix": serialize.encode_matrix(chain.matrix),
    }
    _emit_text(serialize.dumps(payload), args.out)
    return EXIT_OK


def _cmd_ground_states(args) -> int:
    params = _parse_params_arg(args)
    states = ground_state_catalogue(params, args.n_sites)
    payload = [{"label": ns.label,
                "amplitudes": serialize.encode_vector(ns.state.amplitudes)}
               for ns in states]
    _emit_text(serialize.dumps(payload), args.out)
    return EXIT_OK


def _cmd_mps(args) -> int:
    a0 = serialize.decode_matrix(json.loads(args.a0))
    a1 = serialize.decode_matrix(json.loads(args.a1))
    result = mps_contract(MPSSpec(a0, a1), args.n_sites)
    payload = {
        "n_sites": args.n_sites,
        "amplitudes": serialize.encode_vector(result.state.amplitudes),
        "z": result.z,
        "is_zero": result.is_zero,
    }
    _emit_text(serialize.dumps(payload), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    params = _parse_params_arg(args)
    report = family_report(params, args.n_sites)
    _emit_text(serialize.dumps(_report_payload(report)), args.out)
    return EXIT_OK if report.all_pass(args.tol) else EXIT_CLAIM


def _cmd_sweep(args) -> int:
    match = _GRID_RE.match(args.grid)
    if match is None:
        raise serialize.FormatError(
            f"--grid must look like name:lo..hi:count, got {args.grid!r}")
    name = match.group("name")
    count = int(match.group("count"))
    if count < 1:
        raise serialize.FormatError("--grid count must be at least 1")
    values = np.linspace(float(match.group("lo")),
                         float(match.group("hi")), count)
    try:
        base = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise serialize.FormatError(f"--params is not valid JSON: {exc}")
    if not isinstance(base, dict):
        raise serialize.FormatError("--params must be a JSON object")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["params", "ground_energy", "kernel_dim",
                     "max_residual"])
    for value in values:
        mapping = dict(base)
        mapping[name] = float(value)
        params = _decode_params(args.family, mapping)
        report = family_report(params, args.n_sites)
        record = {"family": args.family}
        for key in sorted(mapping):
            record[key] = (serialize.decode_complex(mapping[key])
                           if isinstance(mapping[key], list)
                           else float(mapping[key]))
        max_residual = (serialize.format_float(max(report.residuals.values()))
                        if report.residuals else "")
        writer.writerow([
            serialize.dumps(record),
            serialize.format_float(report.ground_energy),
            str(report.kernel_dim),
            max_residual,
        ])
    _emit_text(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_family_args(sub, with_tol: bool = False) -> None:
    sub.add_argument("--family", required=True,
                     help="family name (for example hardcore, exchange)")
    sub.add_argument("--params", required=True,
                     help="JSON object of family parameters; complex values "
                          "as [re, im]")
    sub.add_argument("--n-sites", type=int, required=True, dest="n_sites")
    if with_tol:
        sub.add_argument("--tol", type=float, default=MEMBER_TOL,
                         help=f"membership residual tolerance "
                              f"(default {MEMBER_TOL:g})")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpschain",
        description="Constraint-space classification and frustration-free "
                    "chain tools.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("classify",
                        help="reduce a constraint space to canonical form")
    p.add_argument("--space", required=True,
                   help="path to a CSpace JSON file, or - for stdin")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_classify)

    p = subs.add_parser("build-h", help="assemble the open-chain operator")
    _add_family_args(p)
    p.add_argument("--out", default=None)
    p.add_argument("--binary", action="store_true",
                   help="write the MPSH binary dump instead of JSON")
    p.set_defaults(handler=_cmd_build_h)

    p = subs.add_parser("ground-states",
                        help="catalogued zero-energy states of a family")
    _add_family_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_ground_states)

    p = subs.add_parser("mps", help="contract a two-matrix bond spec")
    p.add_argument("--a0", required=True,
                   help="JSON matrix for symbol 0, entries as [re, im]")
    p.add_argument("--a1", required=True,
                   help="JSON matrix for symbol 1, entries as [re, im]")
    p.add_argument("--n-sites", type=int, required=True, dest="n_sites")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_mps)

    p = subs.add_parser("verify",
                        help="diagonalize a family chain and test every "
                             "catalogued state")
    _add_family_args(p, with_tol=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_verify)

    p = subs.add_parser("sweep",
                        help="grid sweep of one parameter, CSV output")
    p.add_argument("--family", required=True)
    p.add_argument("--params", default="{}",
                   help="JSON object of fixed parameters")
    p.add_argument("--grid", required=True,
                   help="swept parameter as name:lo..hi:count")
    p.add_argument("--n-sites", type=int, required=True, dest="n_sites")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ClassificationError, NoRepresentationError,
            np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
