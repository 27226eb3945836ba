import random

import pytest

from mcprefix.codes import ChannelSpec, Codebook, Word, codebook


@pytest.fixture
def staircase():
    return codebook((2, 2), [("0", ""), ("1", "0"), ("11", "1")])


@pytest.fixture
def core222():
    return codebook((2, 2, 2), [("", "1", "0"), ("0", "", "1"), ("1", "0", "")])


@pytest.fixture
def interweave5():
    rows = [
        ("", "", "1", "0", "0"),
        ("0", "", "", "1", "0"),
        ("0", "0", "", "", "1"),
        ("1", "0", "0", "", ""),
        ("", "1", "0", "0", ""),
    ]
    return codebook((2,) * 5, rows)


@pytest.fixture
def padded_core():
    return codebook((2, 2, 2, 2), [("1", "01", "10", "0"), ("10", "0", "11", "0"), ("11", "00", "1", "0")])


def random_word(rng: random.Random, spec: ChannelSpec, max_len: int = 3) -> Word:
    return Word(tuple(
        tuple(rng.randrange(q) for _ in range(rng.randint(0, max_len))) for q in spec.sizes
    ))


def random_codebook(rng: random.Random, max_n=4, max_q=5, max_len=3, max_size=8) -> Codebook:
    spec = ChannelSpec(tuple(rng.randint(2, max_q) for _ in range(rng.randint(1, max_n))))
    size = rng.randint(0, max_size)
    words = []
    for _ in range(size * 3):
        if len(words) == size:
            break
        c = random_word(rng, spec, max_len)
        if c.is_empty() or c in words:
            continue
        words.append(c)
    return Codebook(spec, tuple(words))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
