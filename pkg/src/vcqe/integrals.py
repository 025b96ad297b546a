"""Molecular integral container and FCIDUMP text format I/O.

The FCIDUMP convention (Molpro): a namelist header carrying NORB, NELEC and
MS2, followed by whitespace-separated ``value i j k l`` lines with 1-based
spatial-orbital indices.  ``i = j = k = l = 0`` carries the scalar core
energy, ``k = l = 0`` a one-electron integral h_ij, and everything else a
two-electron integral (ij|kl) in chemists' notation.  All integrals are
stored with their full 8-fold permutational symmetry expanded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FcidumpError",
    "MolecularIntegrals",
    "parse_fcidump",
    "write_fcidump",
    "spin_orbital_h",
]


class FcidumpError(ValueError):
    """Raised for malformed FCIDUMP content; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class MolecularIntegrals:
    """One- and two-electron integrals over spatial orbitals, in hartree.

    ``h[p, q]`` holds h_pq and ``v[p, q, r, s]`` holds (pq|rs) in chemists'
    notation; ``core_energy`` is the additive scalar (nuclear repulsion plus
    any frozen-core fold).  Immutable after construction and safe to share.
    """

    n_spatial: int
    n_electrons: int
    core_energy: float
    h: np.ndarray
    v: np.ndarray
    ms2: int = 0

    def __post_init__(self):
        if self.n_spatial < 1:
            raise ValueError(f"n_spatial must be >= 1, got {self.n_spatial}")
        if not 0 <= self.n_electrons <= 2 * self.n_spatial:
            raise ValueError(
                f"n_electrons {self.n_electrons} outside [0, {2 * self.n_spatial}]"
            )
        n = self.n_spatial
        if self.h.shape != (n, n) or self.v.shape != (n, n, n, n):
            raise ValueError("integral array shapes inconsistent with n_spatial")
        if not (np.isfinite(self.core_energy) and np.isfinite(self.h).all()
                and np.isfinite(self.v).all()):
            raise ValueError("non-finite integral values")

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial


def _canonical_pair(i, j):
    return (i, j) if i >= j else (j, i)


def _canonical_quad(i, j, k, l):
    ij = _canonical_pair(i, j)
    kl = _canonical_pair(k, l)
    return ij + kl if ij >= kl else kl + ij


_FLOAT_FIX = re.compile(r"[dD]([+-]?\d)")


def parse_fcidump(text: str) -> MolecularIntegrals:
    """Parse FCIDUMP text into a MolecularIntegrals with symmetries expanded.

    Every stored unique value is copied to all of its permutational partners
    (h_pq = h_qp; 8-fold symmetry for (pq|rs)); unset integrals stay zero.
    Raises FcidumpError on a malformed header, an out-of-range index, or two
    entries for the same canonical index tuple disagreeing beyond 1e-12.
    """
    lines = text.splitlines()

    header_parts: list[str] = []
    body_start = None
    for ln, raw in enumerate(lines, start=1):
        header_parts.append(raw)
        if "&END" in raw.upper() or raw.strip() == "/" or raw.strip().endswith("/"):
            body_start = ln
            break
    if body_start is None:
        raise FcidumpError("header terminator (&END or /) not found", len(lines))
    header = " ".join(header_parts)

    def header_int(key):
        m = re.search(rf"{key}\s*=\s*([+-]?\d+)", header, re.IGNORECASE)
        return int(m.group(1)) if m else None

    norb = header_int("NORB")
    nelec = header_int("NELEC")
    if norb is None or nelec is None:
        raise FcidumpError("header missing NORB or NELEC", body_start)
    ms2 = header_int("MS2") or 0

    core = 0.0
    h = np.zeros((norb, norb))
    v = np.zeros((norb, norb, norb, norb))
    seen: dict[tuple, float] = {}

    for ln in range(body_start, len(lines)):
        stripped = lines[ln].strip()
        if not stripped:
            continue
        fields = _FLOAT_FIX.sub(r"E\1", stripped).split()
        if len(fields) != 5:
            raise FcidumpError(f"expected 'value i j k l', got {stripped!r}", ln + 1)
        try:
            value = float(fields[0])
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError as exc:
            raise FcidumpError(str(exc), ln + 1) from None
        for idx in (i, j, k, l):
            if not 0 <= idx <= norb:
                raise FcidumpError(f"orbital index {idx} outside [0, {norb}]", ln + 1)

        if i == j == k == l == 0:
            key = ("core",)
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"bad index pattern {(i, j, k, l)}", ln + 1)
            key = ("h",) + _canonical_pair(i, j)
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError(f"bad index pattern {(i, j, k, l)}", ln + 1)
            key = ("v",) + _canonical_quad(i, j, k, l)
        if key in seen and abs(seen[key] - value) > 1e-12:
            raise FcidumpError(
                f"conflicting duplicate for {key}: {seen[key]} vs {value}", ln + 1
            )
        seen[key] = value

        if key[0] == "core":
            core = value
        elif key[0] == "h":
            p, q = i - 1, j - 1
            h[p, q] = h[q, p] = value
        else:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in (
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            ):
                v[a, b, c, d] = value

    return MolecularIntegrals(
        n_spatial=norb, n_electrons=nelec, core_energy=core, h=h, v=v, ms2=ms2
    )


def write_fcidump(integrals: MolecularIntegrals, threshold: float = 0.0) -> str:
    """Render MolecularIntegrals as FCIDUMP text (unique entries only).

    Values are written with 17 significant digits so a write/parse round trip
    is exact to double precision.
    """
    n = integrals.n_spatial
    out = [
        f" &FCI NORB={n},NELEC={integrals.n_electrons},MS2={integrals.ms2},",
        "  ORBSYM=" + ",".join("1" for _ in range(n)) + ",",
        "  ISYM=1,",
        " &END",
    ]

    def emit(value, i, j, k, l):
        out.append(f" {value: .16e} {i:4d} {j:4d} {k:4d} {l:4d}")

    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    val = integrals.v[i, j, k, l]
                    if abs(val) > threshold:
                        emit(val, i + 1, j + 1, k + 1, l + 1)
    for i in range(n):
        for j in range(i + 1):
            if abs(integrals.h[i, j]) > threshold:
                emit(integrals.h[i, j], i + 1, j + 1, 0, 0)
    emit(integrals.core_energy, 0, 0, 0, 0)
    return "\n".join(out) + "\n"


def spin_orbital_h(integrals: MolecularIntegrals, p: int, q: int) -> float:
    """One-electron integral over spin orbitals in block (alpha-then-beta) layout.

    Spin orbitals [0, n) are alpha over spatial orbital p, [n, 2n) are beta;
    opposite-spin elements vanish by spin orthogonality.
    """
    n = integrals.n_spatial
    if not (0 <= p < 2 * n and 0 <= q < 2 * n):
        raise ValueError(f"spin-orbital index out of range: {(p, q)}")
    if (p < n) != (q < n):
        return 0.0
    return float(integrals.h[p % n, q % n])
