import numpy as np
import pytest

from vcqe import FcidumpError, parse_fcidump, spin_orbital_h, write_fcidump

MINIMAL = """\
 &FCI NORB=2,NELEC=2,MS2=0,
  ORBSYM=1,1,
  ISYM=1,
 &END
 0.5 1 2 0 0
 0.71510433 0 0 0 0
"""


def test_core_energy_line():
    ints = parse_fcidump(MINIMAL)
    assert ints.core_energy == 0.71510433
    assert ints.n_spatial == 2
    assert ints.n_electrons == 2


def test_one_electron_symmetry_expansion():
    ints = parse_fcidump(MINIMAL)
    assert ints.h[0, 1] == 0.5
    assert ints.h[1, 0] == 0.5
    assert ints.h[0, 0] == 0.0


def test_two_electron_eightfold_closure():
    text = MINIMAL + " 0.3 1 2 2 2\n"
    v = parse_fcidump(text).v
    val = v[0, 1, 1, 1]
    for idx in [(0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)]:
        assert v[idx] == val == 0.3


def test_symmetry_closure_on_fixture(h4_integrals):
    rng = np.random.default_rng(7)
    v = h4_integrals.v
    for _ in range(200):
        p, q, r, s = rng.integers(0, 4, size=4)
        val = v[p, q, r, s]
        for a, b, c, d in [(q, p, r, s), (p, q, s, r), (q, p, s, r),
                           (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)]:
            assert v[a, b, c, d] == val


def test_h_symmetric_on_fixture(h4_integrals):
    assert np.array_equal(h4_integrals.h, h4_integrals.h.T)


def test_round_trip(h4_integrals):
    again = parse_fcidump(write_fcidump(h4_integrals))
    assert again.n_spatial == h4_integrals.n_spatial
    assert again.n_electrons == h4_integrals.n_electrons
    assert abs(again.core_energy - h4_integrals.core_energy) < 1e-14
    assert np.abs(again.h - h4_integrals.h).max() < 1e-14
    assert np.abs(again.v - h4_integrals.v).max() < 1e-14


def test_order_independence(h4_integrals):
    text = write_fcidump(h4_integrals)
    lines = text.splitlines()
    header, body = lines[:4], lines[4:]
    rng = np.random.default_rng(3)
    shuffled = [body[i] for i in rng.permutation(len(body))]
    again = parse_fcidump("\n".join(header + shuffled))
    assert np.abs(again.h - h4_integrals.h).max() == 0.0
    assert np.abs(again.v - h4_integrals.v).max() == 0.0
    assert again.core_energy == h4_integrals.core_energy


def test_missing_norb_is_parse_error():
    with pytest.raises(FcidumpError):
        parse_fcidump(" &FCI NELEC=2,MS2=0,\n &END\n 1.0 0 0 0 0\n")


def test_missing_nelec_is_parse_error():
    with pytest.raises(FcidumpError):
        parse_fcidump(" &FCI NORB=2,\n &END\n 1.0 0 0 0 0\n")


def test_index_out_of_range():
    with pytest.raises(FcidumpError) as err:
        parse_fcidump(MINIMAL + " 0.1 3 1 0 0\n")
    assert "line" in str(err.value)


def test_conflicting_duplicate():
    bad = MINIMAL + " 0.25 1 2 0 0\n"
    with pytest.raises(FcidumpError, match="conflicting"):
        parse_fcidump(bad)


def test_consistent_duplicate_allowed():
    # symmetry partner carrying the same value is not a conflict
    ok = MINIMAL + " 0.5 2 1 0 0\n"
    assert parse_fcidump(ok).h[0, 1] == 0.5


def test_fortran_d_exponents():
    ints = parse_fcidump(
        " &FCI NORB=1,NELEC=1,MS2=1,\n &END\n 1.5D-01 1 1 0 0\n 0.0 0 0 0 0\n"
    )
    assert ints.h[0, 0] == 0.15


def test_spin_orbital_h(h4_integrals):
    n = h4_integrals.n_spatial
    assert spin_orbital_h(h4_integrals, 0, n) == 0.0
    assert spin_orbital_h(h4_integrals, 0, 1) == h4_integrals.h[0, 1]
    assert spin_orbital_h(h4_integrals, n + 1, n + 1) == h4_integrals.h[1, 1]
    with pytest.raises(ValueError):
        spin_orbital_h(h4_integrals, 2 * n, 0)
