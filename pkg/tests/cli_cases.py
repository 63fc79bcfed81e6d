"""CLI golden cases: each runs its steps in a fresh directory and records
stdout, exit codes and every JSON artifact written."""

import contextlib
import io
import os
import shutil
from pathlib import Path

from ramforge.cli import main

GOLDEN = Path(__file__).parent / "golden"
INPUTS = GOLDEN / "inputs"

LT = ["lt", "build", "--p", "2", "--f", "1", "--e", "1", "--N", "16", "--T", "6"]

CASES = {
    "ring_info": [["ring", "info", "--p", "2", "--f", "2", "--e", "2"]],
    "lt_build": [LT],
    "lt_endo": [LT, ["lt", "endo", "--alpha", "1+2^2", "--deg", "8", "--out", "endo.json"]],
    "lt_reduce": [LT, ["lt", "reduce", "--alpha", "5", "--deg", "16", "--out", "red.json"],
                  ["lt", "reduce", "--out", "Fbar.json"]],
    "lt_check": [LT, ["lt", "check"]],
    "criterion_check": [["criterion", "check", "--p", "2", "--f", "1", "--e", "1", "--alpha", "5",
                         "--nmax", "2"]],
    "criterion_check_fq": [["criterion", "check", "--p", "2", "--f", "2", "--e", "1", "--alpha", "1+pi^2",
                            "--nmax", "2"]],
    "criterion_predict": [["criterion", "predict", "--p", "3", "--ell", "1", "--n", "1"],
                          ["criterion", "predict", "--p", "2", "--i0", "15", "--i1", "63", "--d", "2",
                           "--n", "2"]],
    "ram_profile": [["ram", "profile", "--series", "sigma.json", "--nmax", "5", "--out", "profile.json"]],
    "ram_profile_ok": [["ram", "profile", "--series", "tau.json", "--nmax", "2"]],
    "ram_filtration": [["ram", "filtration", "--series", "tau.json", "--n", "2", "--out", "filt.json"],
                       ["herbrand", "phi", "--filtration", "filt.json", "--out", "phi.json"],
                       ["herbrand", "phi", "--filtration", "filt.json", "--psi"],
                       ["herbrand", "breaks", "--filtration", "filt.json"]],
    "herbrand_synthetic": [["herbrand", "breaks", "--q", "3", "--r", "2", "--levels", "3"],
                           ["herbrand", "window", "--q", "2", "--r", "2", "--levels", "4"]],
    "lift_zspace": [["lift", "zspace", "--p", "2", "--zeta", "0,1", "--mu", "1,1,1", "--deg", "16"]],
    "lift_rectify": [["lift", "conjugate", "--p", "2", "--beta", "2", "--psi0", "1,1,2", "--target", "8",
                      "--deg", "64"],
                     ["lift", "rectify", "--input", "g.json", "--oracle", "family.json", "--target", "8",
                      "--deg", "64"]],
    "lift_rectify_z3": [["lift", "conjugate", "--p", "3", "--beta", "3", "--psi0", "1,2", "--target", "8",
                         "--deg", "64"],
                        ["lift", "rectify", "--input", "g.json", "--oracle", "family.json", "--target", "8",
                         "--deg", "64"]],
    "lift_conjugate_seeded": [["--seed", "7", "lift", "conjugate", "--p", "2", "--beta", "4", "--target", "4",
                               "--deg", "16"]],
    "errors": [["ring", "info", "--p", "4"],
               ["lt", "check", "--group", "missing.json"],
               ["criterion", "check", "--p", "2", "--alpha", "2", "--nmax", "2"],
               ["lift", "zspace", "--p", "2", "--zeta", "0,1", "--mu", "1,1", "--deg", "3"]],
}


def run_case(steps, workdir: Path) -> dict:
    """Artifacts of one case: '<name>.log' plus every JSON file left in workdir."""
    for src in INPUTS.iterdir():
        shutil.copy(src, workdir / src.name)
    before = {p.name for p in workdir.iterdir()}
    log = io.StringIO()
    cwd = os.getcwd()
    os.chdir(workdir)
    try:
        for argv in steps:
            out, err = io.StringIO(), io.StringIO()
            with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
                code = main(argv)
            log.write(f"$ ramforge {' '.join(argv)}\n{out.getvalue()}{err.getvalue()}[exit {code}]\n")
    finally:
        os.chdir(cwd)
    arts = {"log": log.getvalue().encode()}
    for p in sorted(workdir.iterdir()):
        if p.name not in before:
            arts[p.name] = p.read_bytes()
    return arts


def run_suite(root: Path) -> dict:
    results = {}
    for name, steps in CASES.items():
        wd = root / name
        wd.mkdir(parents=True)
        results[name] = run_case(steps, wd)
    return results


def write_goldens(results: dict) -> None:
    for name, arts in results.items():
        d = GOLDEN / name
        if d.exists():
            shutil.rmtree(d)
        d.mkdir()
        for fname, data in arts.items():
            (d / fname).write_bytes(data)


def read_goldens(name: str) -> dict:
    d = GOLDEN / name
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())} if d.exists() else {}


if __name__ == "__main__":
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        write_goldens(run_suite(Path(tmp)))
