import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import vcqe

FIXTURES = Path(__file__).parent / "fixtures"

H4_FCIDUMP = FIXTURES / "h4_sto6g_r1.00.fcidump"
H2_FCIDUMP = FIXTURES / "h2_sto6g_r0.74.fcidump"
BH_DIR = FIXTURES / "bh_scan"


@pytest.fixture(scope="session")
def h4_integrals():
    return vcqe.parse_fcidump(H4_FCIDUMP.read_text())


@pytest.fixture(scope="session")
def h2_integrals():
    return vcqe.parse_fcidump(H2_FCIDUMP.read_text())


@pytest.fixture(scope="session")
def h2_basis():
    return vcqe.enumerate_sector(2, 1, 1)


@pytest.fixture(scope="session")
def h2_hamiltonian(h2_integrals, h2_basis):
    return vcqe.build_hamiltonian(h2_integrals, h2_basis)


@pytest.fixture(scope="session")
def h4_basis():
    return vcqe.enumerate_sector(4, 2, 2)


@pytest.fixture(scope="session")
def h4_hamiltonian(h4_integrals, h4_basis):
    return vcqe.build_hamiltonian(h4_integrals, h4_basis)


@pytest.fixture(scope="session")
def h4_spectrum(h4_hamiltonian):
    return vcqe.diagonalize(h4_hamiltonian)
