"""The fifteen acceptance criteria, one test each.

Every test prints a single PASS/FAIL line; the lines are also collected into an
"acceptance criteria" section at the end of the pytest run.
"""

import pytest

from drinlog.suites import CRITERIA

LABELS = {
    1: "shadowed-partition counts",
    2: "direct and recursive B_n agree",
    3: "first column of the frame product",
    4: "B_n(theta) equals the log coefficient",
    5: "Carlitz closed forms and Omega",
    6: "exp/log inversion",
    7: "Artin-Schreier difference machinery",
    8: "Anderson exponentiation",
    9: "Carlitz period recovery",
    10: "extended log inside the radius",
    11: "functional equation",
    12: "inverse of exp",
    13: "k_infinity branch",
    14: "phi_j identity",
    15: "lattice-product exponential",
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    try:
        check = CRITERIA[number]()
    except Exception as exc:
        line = f"criterion {number:2d} [FAIL] {LABELS[number]} ({type(exc).__name__}: {exc})"
        print(line)
        acceptance_log.append(line)
        raise
    status = "PASS" if check.passed else "FAIL"
    line = f"criterion {number:2d} [{status}] {LABELS[number]}"
    print(line)
    acceptance_log.append(line)
    assert check.passed, check.details
