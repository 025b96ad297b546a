#!/usr/bin/env python3
"""Produce FCIDUMP fixtures for linear H4, H2 and BH in STO-6G.

Runs restricted Hartree-Fock on internally evaluated Gaussian integrals,
transforms to the MO basis, folds any frozen core into the effective
integrals and core energy, and writes a Molpro-convention FCIDUMP plus a
sidecar JSON with the SCF energy and nuclear repulsion for cross-checks.

Usage: generate.py --molecule {h4|h2|bh} [--distance D] --out PATH
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from scipy import constants

from mdints import build_ao_integrals
from scf import (fold_frozen_core, mo_integrals, nuclear_repulsion,
                 restricted_hartree_fock)
from sto6g import ATOMIC_NUMBER, CORE_ORBITALS, atom_orbitals

ANGSTROM_TO_BOHR = 1.0 / (constants.physical_constants["Bohr radius"][0] * 1e10)

DEFAULT_DISTANCE = {"h2": 0.74, "h4": 1.0, "bh": 1.2}


def molecule_geometry(name: str, distance: float):
    """(symbols, centers in bohr); distance in angstrom."""
    d = distance * ANGSTROM_TO_BOHR
    if name == "h2":
        return ["H", "H"], [(0.0, 0.0, 0.0), (0.0, 0.0, d)]
    if name == "h4":
        return ["H"] * 4, [(0.0, 0.0, i * d) for i in range(4)]
    if name == "bh":
        return ["B", "H"], [(0.0, 0.0, 0.0), (0.0, 0.0, d)]
    raise ValueError(f"unknown molecule {name!r}")


def write_fcidump_text(path: Path, core_energy, h, v, nelec, ms2=0,
                       threshold=0.0):
    n = h.shape[0]
    lines = [
        f" &FCI NORB={n},NELEC={nelec},MS2={ms2},",
        "  ORBSYM=" + ",".join("1" for _ in range(n)) + ",",
        "  ISYM=1,",
        " &END",
    ]
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    if abs(v[i, j, k, l]) > threshold:
                        lines.append(f" {v[i, j, k, l]: .16e} {i + 1:4d}"
                                     f" {j + 1:4d} {k + 1:4d} {l + 1:4d}")
    for i in range(n):
        for j in range(i + 1):
            if abs(h[i, j]) > threshold:
                lines.append(f" {h[i, j]: .16e} {i + 1:4d} {j + 1:4d}    0    0")
    lines.append(f" {core_energy: .16e}    0    0    0    0")
    path.write_text("\n".join(lines) + "\n")


def generate(molecule: str, distance: float, out: Path) -> dict:
    symbols, centers = molecule_geometry(molecule, distance)
    charges = [ATOMIC_NUMBER[s] for s in symbols]
    aos = [ao for s, c in zip(symbols, centers) for ao in atom_orbitals(s, c)]

    S, T, V, eri = build_ao_integrals(aos, charges, centers)
    e_nuc = nuclear_repulsion(charges, centers)
    n_electrons = sum(charges)
    e_scf, C, mo_e = restricted_hartree_fock(S, T, V, eri, n_electrons, e_nuc)

    h_mo, v_mo = mo_integrals(T + V, eri, C)
    n_frozen = sum(CORE_ORBITALS[s] for s in symbols)
    core_energy, h_act, v_act = fold_frozen_core(h_mo, v_mo, e_nuc, n_frozen)
    nelec_active = n_electrons - 2 * n_frozen

    out.parent.mkdir(parents=True, exist_ok=True)
    write_fcidump_text(out, core_energy, h_act, v_act, nelec_active)

    sidecar = {
        "molecule": molecule,
        "distance_angstrom": distance,
        "basis": "STO-6G (least-squares Slater expansions, internal)",
        "n_spatial": int(h_act.shape[0]),
        "n_electrons_active": int(nelec_active),
        "n_frozen_core": int(n_frozen),
        "scf_energy": float(e_scf),
        "nuclear_repulsion": float(e_nuc),
        "core_energy": float(core_energy),
        "mo_energies": [float(x) for x in mo_e],
        "fcidump": out.name,
    }
    sidecar_path = out.with_suffix(out.suffix + ".json")
    sidecar_path.write_text(json.dumps(sidecar, indent=1) + "\n")
    return sidecar


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--molecule", required=True, choices=["h2", "h4", "bh"])
    parser.add_argument("--distance", type=float, default=None,
                        help="bond (or adjacent-atom) distance in angstrom")
    parser.add_argument("--out", required=True, type=Path)
    args = parser.parse_args(argv)

    distance = args.distance
    if distance is None:
        distance = DEFAULT_DISTANCE[args.molecule]
    try:
        sidecar = generate(args.molecule, distance, args.out)
    except RuntimeError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return 1
    print(f"{args.out}: SCF {sidecar['scf_energy']:.10f} hartree, "
          f"NORB={sidecar['n_spatial']}, NELEC={sidecar['n_electrons_active']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
