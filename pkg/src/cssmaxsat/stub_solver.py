"""Minimal MaxSAT solver process speaking the evaluation output protocol.

Reads a WCNF file in either dialect, solves it with the embedded engine and
prints ``o``, ``s`` and ``v`` lines. ``--bits`` selects the 0/1 string model
line instead of signed literals. Used to exercise the external-solver path.

    python -m cssmaxsat.stub_solver [--bits] instance.wcnf
"""

import argparse
import sys

from .solver import Status, solve_exact
from .wcnf import read_wcnf

_STATUS_TEXT = {
    Status.OPTIMUM: "OPTIMUM FOUND",
    Status.BOUND: "SATISFIABLE",
    Status.HARD_UNSAT: "UNSATISFIABLE",
    Status.TIMEOUT: "UNKNOWN",
}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cssmaxsat-stub-solver")
    parser.add_argument("wcnf")
    parser.add_argument("--bits", action="store_true", help="print the model as one 0/1 string")
    args = parser.parse_args(argv)
    formula = read_wcnf(args.wcnf)
    answer = solve_exact(formula)
    if answer.status in (Status.OPTIMUM, Status.BOUND):
        print(f"o {answer.objective:g}")
    print(f"s {_STATUS_TEXT[answer.status]}")
    if answer.status in (Status.OPTIMUM, Status.BOUND):
        vals = answer.values[1:]
        if args.bits:
            print("v " + "".join("1" if v else "0" for v in vals))
        else:
            print("v " + " ".join(str(i if v else -i) for i, v in enumerate(vals, start=1)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
