import re
from collections import defaultdict

CRITERIA = {
    1: "HS axiom on random derivations",
    2: "group laws and block-order identities",
    3: "bivariate identities and logarithmic combinations",
    4: "gd_pt order, logarithmicity and top relation",
    5: "base-p digit combinatorics",
    6: "closed-form integrators at n = 6 and n = 10",
    7: "compression of e-blocks to p^s-integrals",
    8: "end-to-end leap bridge",
    9: "leap scan on binomial curves",
    10: "staged search against exhaustive enumeration",
}

_results = defaultdict(list)
_pattern = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")


def pytest_runtest_logreport(report):
    m = _pattern.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _results[int(m.group(1))].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _results.get(n)
        if runs is None:
            verdict = "NOT RUN"
        else:
            verdict = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}")
