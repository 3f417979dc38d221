import pytest

from weakseq.construction import paraboloid_kind, power_kind, standard_sequence
from weakseq.proof_lab import sequence_triples


@pytest.fixture(scope="session")
def seq2():
    """The 6-block m = 2 family over primes (5, 11, 23, 47, 97, 197)."""
    return standard_sequence(power_kind(2))


@pytest.fixture(scope="session")
def triples2(seq2):
    return sequence_triples(seq2)


@pytest.fixture(scope="session")
def para_seq():
    """A 4-block d = 2 paraboloid family."""
    return standard_sequence(paraboloid_kind(2), count=4)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
