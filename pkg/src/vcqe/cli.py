"""Command-line runner: FCI reference, solver runs, bond scans, delta studies.

Subcommands
    fci          eigenvalues of the sector Hamiltonian
    solve        one variance-minimization run with full trace
    scan         the same state specs across a list of FCIDUMP geometries
    delta-study  emulated-variance error versus delta, with extrapolation

Results are emitted as JSON (default) or CSV; documents embed the fully
resolved configuration so identical inputs produce identical bytes.
Exit codes: 0 success, 2 parse/spec error, 3 non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .fci import diagonalize, eigenstate_overlap
from .integrals import FcidumpError, parse_fcidump
from .measurement import MeasurementConfig, emulated_variance, richardson
from .solver import OccupationSpec, SolverConfig, initial_state, solve
from .statevector import build_hamiltonian, expectation, spin_expectations, variance
from .fock import enumerate_sector

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4


def _parse_occupations(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"occupation list {text!r} must be comma-separated integers")


def _parse_state(text: str) -> OccupationSpec:
    """State spec 'ALPHA/BETA[:COMBO]', e.g. '0,1/0,2:triplet'."""
    combo = None
    if ":" in text:
        text, combo = text.rsplit(":", 1)
    if "/" not in text:
        raise ValueError(f"state spec {text!r} must look like ALPHA/BETA[:COMBO]")
    alpha, beta = text.split("/", 1)
    return OccupationSpec(_parse_occupations(alpha), _parse_occupations(beta), combo)


def _load_hamiltonian(path: str, spec: OccupationSpec):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc}") from exc
    integrals = parse_fcidump(text)
    basis = enumerate_sector(integrals.n_spatial, len(spec.alpha), len(spec.beta))
    return integrals, basis, build_hamiltonian(integrals, basis)


class _IOFailure(RuntimeError):
    pass


def _emit(doc: dict, rows_key: str, args) -> None:
    if args.format == "json":
        payload = json.dumps(doc, indent=1) + "\n"
    else:
        rows = doc.get(rows_key) or []
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        payload = buf.getvalue()
    if args.out:
        try:
            Path(args.out).write_text(payload)
        except OSError as exc:
            raise _IOFailure(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(payload)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        epsilon=args.tol,
        max_iterations=args.max_iter,
        alpha_max=args.alpha_max,
        line_search_tol=args.line_search_tol,
        gradient_mode=args.gradient,
        deltas=tuple(args.delta),
    )


def _config_dict(args, spec: OccupationSpec, fcidump) -> dict:
    return {
        "fcidump": fcidump,
        "alpha": list(spec.alpha),
        "beta": list(spec.beta),
        "combo": spec.combo,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "alpha_max": args.alpha_max,
        "line_search_tol": args.line_search_tol,
        "gradient": args.gradient,
        "deltas": list(args.delta),
        "format": args.format,
    }


def _run_state(path: str, spec: OccupationSpec, config: SolverConfig) -> dict:
    integrals, basis, H = _load_hamiltonian(path, spec)
    guess = initial_state(basis, spec)
    result = solve(H, guess, config)
    spectrum = diagonalize(H)
    overlaps = eigenstate_overlap(result.state, spectrum)
    dominant = int(np.argmax(overlaps))
    final = result.records[-1]
    sz, s2 = spin_expectations(result.state)
    return {
        "converged": result.converged,
        "reason": result.reason,
        "energy": final.energy,
        "fci_energy": float(spectrum.eigenvalues[dominant]),
        "energy_error": abs(final.energy - float(spectrum.eigenvalues[dominant])),
        "variance": final.variance,
        "exact_variance": variance(result.state, H),
        "cse_norm": final.cse_norm,
        "iterations": result.n_iterations,
        "sz": sz,
        "s_squared": s2,
        "multiplicity": int(round(np.sqrt(4.0 * s2 + 1.0))),
        "dominant_eigenstate": dominant,
        "dominant_overlap": float(overlaps[dominant]),
        "trace": [r.as_dict() for r in result.records],
    }


def _cmd_fci(args) -> int:
    spec = OccupationSpec(_parse_occupations(args.alpha),
                          _parse_occupations(args.beta), None)
    integrals, basis, H = _load_hamiltonian(args.fcidump, spec)
    spectrum = diagonalize(H)
    doc = {
        "config": {
            "fcidump": args.fcidump,
            "n_alpha": basis.n_alpha,
            "n_beta": basis.n_beta,
            "format": args.format,
        },
        "sector_dimension": len(basis),
        "eigenvalues": [float(e) for e in spectrum.eigenvalues],
    }
    doc["rows"] = [{"index": i, "energy": e} for i, e in enumerate(doc["eigenvalues"])]
    _emit(doc, "rows", args)
    return EXIT_OK


def _cmd_solve(args) -> int:
    spec = _state_from_args(args)
    config = _solver_config(args)
    run = _run_state(args.fcidump, spec, config)
    trace = run.pop("trace")
    doc = {
        "config": _config_dict(args, spec, args.fcidump),
        "summary": run,
        "trace": trace,
    }
    _emit(doc, "trace", args)
    return EXIT_OK if run["converged"] else EXIT_NOT_CONVERGED


def _state_from_args(args) -> OccupationSpec:
    return OccupationSpec(_parse_occupations(args.alpha),
                          _parse_occupations(args.beta), args.combo)


def _cmd_scan(args) -> int:
    if args.state:
        specs = [_parse_state(s) for s in args.state]
    else:
        specs = [_state_from_args(args)]
    config = _solver_config(args)
    rows = []
    for path in args.fcidump:
        for state_index, spec in enumerate(specs):
            row = {"fcidump": path, "state": state_index}
            try:
                run = _run_state(path, spec, config)
                run.pop("trace")
                row.update(run)
                row["failed"] = not run["converged"]
            except (FcidumpError, ValueError, _IOFailure, OSError) as exc:
                row.update({"failed": True, "error": str(exc)})
            rows.append(row)
    summary = {}
    for state_index in range(len(specs)):
        errs = [r["energy_error"] for r in rows
                if r["state"] == state_index and not r.get("failed")]
        summary[str(state_index)] = {
            "n_geometries": len(args.fcidump),
            "n_converged": len(errs),
            "max_energy_error": max(errs) if errs else None,
        }
    doc = {
        "config": _config_dict(args, specs[0], list(args.fcidump)),
        "states": [{"alpha": list(s.alpha), "beta": list(s.beta), "combo": s.combo}
                   for s in specs],
        "summary": summary,
        "rows": rows,
    }
    _emit(doc, "rows", args)
    all_ok = all(not r.get("failed") for r in rows)
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


def _cmd_delta_study(args) -> int:
    spec = _state_from_args(args)
    integrals, basis, H = _load_hamiltonian(args.fcidump, spec)
    psi = initial_state(basis, spec)
    exact = variance(psi, H)
    rows = []
    for delta in args.delta:
        est = emulated_variance(psi, H, delta)
        rows.append({
            "delta": delta,
            "emulated_variance": est,
            "exact_variance": exact,
            "error": abs(est - exact),
        })
    extrapolated = (richardson([(r["delta"], r["emulated_variance"]) for r in rows])
                    if len(rows) >= 2 else rows[0]["emulated_variance"])
    doc = {
        "config": _config_dict(args, spec, args.fcidump),
        "energy": expectation(psi, H),
        "rows": rows,
        "richardson": {
            "value": extrapolated,
            "error": abs(extrapolated - exact),
        },
    }
    _emit(doc, "rows", args)
    return EXIT_OK


def _add_state_flags(p):
    p.add_argument("--alpha", required=True,
                   help="comma-separated 0-based spatial orbitals for spin up")
    p.add_argument("--beta", required=True,
                   help="comma-separated 0-based spatial orbitals for spin down")


def _add_solver_flags(p):
    p.add_argument("--combo", choices=["singlet", "triplet"], default=None)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="variance convergence tolerance (hartree^2)")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--alpha-max", type=float, default=1.0,
                   help="line-search step cap")
    p.add_argument("--line-search-tol", type=float, default=1e-10)
    p.add_argument("--gradient", choices=["exact", "emulated"], default="exact")
    p.add_argument("--delta", type=float, action="append", default=None,
                   help="delta ladder entry (repeatable)")


def _add_output_flags(p):
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcqe",
        description="Variance-based contracted quantum eigensolver runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fci", help="exact diagonalization of the sector")
    p.add_argument("--fcidump", required=True)
    _add_state_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_fci)

    p = sub.add_parser("solve", help="run the variance solver for one state")
    p.add_argument("--fcidump", required=True)
    _add_state_flags(p)
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("scan", help="solve the same states over many geometries")
    p.add_argument("--fcidump", required=True, action="append",
                   help="FCIDUMP path (repeatable)")
    p.add_argument("--alpha", default="", help="spin-up occupations (single state)")
    p.add_argument("--beta", default="", help="spin-down occupations (single state)")
    p.add_argument("--state", action="append", default=None,
                   help="state spec ALPHA/BETA[:COMBO] (repeatable; overrides "
                        "--alpha/--beta)")
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("delta-study",
                       help="emulated-variance error versus delta for a state")
    p.add_argument("--fcidump", required=True)
    _add_state_flags(p)
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_delta_study)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "delta", None) is None:
        args.delta = list(MeasurementConfig().deltas)
    try:
        return args.func(args)
    except FcidumpError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _IOFailure as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
