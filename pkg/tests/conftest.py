import random
from fractions import Fraction

import pytest

from simplexvol import DegenerateSimplexError, Polynomial, Simplex

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        previous = _ACCEPTANCE.get(number, ("PASS", title))[0]
        status = "FAIL" if failed or previous == "FAIL" else "PASS"
        _ACCEPTANCE[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2} {status}: {title}")


def random_rational_simplex(rng: random.Random, d: int, lo=-6, hi=6, max_den=4, nonneg=False) -> Simplex:
    while True:
        lo_ = 0 if nonneg else lo
        rows = [[Fraction(rng.randint(lo_, hi), rng.randint(1, max_den)) for _ in range(d)] for _ in range(d + 1)]
        if nonneg and any(all(x == 0 for x in r) for r in rows):
            continue
        try:
            return Simplex(rows)
        except DegenerateSimplexError:
            continue


def random_polynomial(rng: random.Random, d: int, degree: int, max_terms=6) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        total = rng.randint(0, degree)
        e = [0] * d
        for _ in range(total):
            e[rng.randrange(d)] += 1
        terms[tuple(e)] = terms.get(tuple(e), 0) + Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return Polynomial(terms, d)


def random_homogeneous_polynomial(rng: random.Random, d: int, q: int, max_terms=5) -> Polynomial:
    terms = {}
    while not terms:
        for _ in range(rng.randint(1, max_terms)):
            e = [0] * d
            for _ in range(q):
                e[rng.randrange(d)] += 1
            c = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            if c:
                terms[tuple(e)] = c
    return Polynomial(terms, d)
