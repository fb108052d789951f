"""Regenerate the example documents in corpus/ and their golden CLI outputs.

Usage: python3 scripts/make_corpus.py [--check]

With --check nothing is written; the script exits non-zero if any golden file
differs from a fresh run.
"""

from __future__ import annotations

import argparse
import io as _io
import json
import sys
from pathlib import Path

import numpy as np

from anyent import io
from anyent.cli import main
from anyent.model import builtin_model, model_to_dict
from anyent.ops import BasisDescriptor, SystemGeometry, make_state
from anyent.tree import Labelling

ROOT = Path(__file__).resolve().parent.parent / "corpus"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def documents() -> dict:
    docs = {}
    ising = builtin_model("ising")
    docs["models/ising.json"] = io.dumps(model_to_dict(ising))
    corrupt = model_to_dict(ising)
    for entry in corrupt["F"]:
        if [entry[k] for k in "abcdef"] == ["sigma", "sigma", "sigma", "sigma", "1", "psi"]:
            entry["re"] = 0.6
    docs["models/ising_corrupt_F.json"] = io.dumps(corrupt)
    docs["models/malformed.json"] = '{"name": "broken", "charges": ["1", "x"],\n  "trivial": "1"\n'

    # six sigma anyons on a disc with trivial boundary charge
    six = SystemGeometry.build(ising, [(str(k), "sigma") for k in range(1, 7)])
    docs["systems/ising6.json"] = io.serialize(six)
    basis_over = BasisDescriptor(("1", "2", "4", "3", "5", "6"), ((3, 1),))
    basis_under = BasisDescriptor(("1", "2", "4", "3", "5", "6"), ((3, -1),))
    docs["states/ising6_equal_over.json"] = io.serialize(make_state(six, np.ones(4), basis_over))
    docs["states/ising6_equal_under.json"] = io.serialize(make_state(six, np.ones(4), basis_under))
    docs["bipartitions/ising6_AB.json"] = io.dumps({"A": ["1", "2", "4"], "B": ["3", "5", "6"], "boundary": "B"})
    docs["bipartitions/ising6_CD.json"] = io.dumps({"A": ["1", "2"], "B": ["3", "4", "5", "6"], "boundary": "B"})
    docs["bipartitions/ising6_123.json"] = io.dumps({"A": ["1", "2", "3"], "B": ["4", "5", "6"], "boundary": "B"})
    docs["bipartitions/ising6_ends.json"] = io.dumps(
        {"A": ["1", "2", "5", "6"], "B": ["3", "4"], "boundary": "B", "sections": [["1", "2"], ["5", "6"]]})
    docs["bipartitions/ising6_swapped.json"] = io.dumps({"A": ["3", "5", "6"], "B": ["1", "2", "4"], "boundary": "B"})

    # four Fibonacci anyons, pairs (12) and (34) each fused to the vacuum
    fib = builtin_model("fibonacci")
    fib4 = SystemGeometry.build(fib, [(str(k), "tau") for k in range(1, 5)])
    docs["systems/fib4.json"] = io.serialize(fib4)
    one, tau = fib.index("1"), fib.index("tau")
    lab = Labelling.from_path((tau,) * 4, (tau, one, tau, one))
    docs["states/fib4_product.json"] = io.serialize(make_state(fib4, {lab: 1.0}))
    rng = np.random.default_rng(7)
    docs["states/fib4_random.json"] = io.serialize(make_state(fib4, np.round(rng.normal(size=2), 6)))
    docs["bipartitions/fib4_12_34.json"] = io.dumps({"A": ["1", "2"], "B": ["3", "4"], "boundary": "B"})
    docs["bipartitions/fib4_23.json"] = io.dumps({"A": ["2", "3"], "B": ["1", "4"], "boundary": "B"})

    # four qutrits as z_3 anyons with total charge 0
    z3 = builtin_model("z_3")
    q4 = SystemGeometry.build(z3, [(str(k), "*") for k in range(1, 5)], boundary="0")
    docs["systems/z3_qutrits.json"] = io.serialize(q4)
    v = np.round(rng.normal(size=27) + 1j * rng.normal(size=27), 6)
    docs["states/z3_random.json"] = io.serialize(make_state(q4, v))
    docs["bipartitions/z3_13.json"] = io.dumps({"A": ["1", "3"], "B": ["2", "4"], "boundary": "B"})

    # five sigma anyons with free boundary charge
    free5 = SystemGeometry.build(ising, [(str(k), "sigma") for k in range(1, 6)], boundary="free")
    docs["systems/ising5_free.json"] = io.serialize(free5)
    psi = make_state(free5, np.round(rng.normal(size=4) + 1j * rng.normal(size=4), 6), total=ising.index("sigma"))
    docs["states/ising5_free.json"] = io.serialize(psi)
    docs["bipartitions/ising5_24.json"] = io.dumps({"A": ["2", "4"], "B": ["1", "3", "5"], "boundary": "B"})
    from anyent.ops import density_matrix
    from anyent.reduce import Bipartition, reduced_density_matrix

    rho = density_matrix(make_state(six, [1.0, 0.5, -0.25, 1.0], basis_over))
    docs["states/ising6_mixed_over.json"] = io.serialize(rho)
    rho_A = reduced_density_matrix(rho, Bipartition(("1", "2", "4"), ("3", "5", "6")), "A")
    docs["reduced/ising6_over_AB_A.json"] = io.serialize(rho_A)
    docs["systems/torus.json"] = json.dumps(
        {"model": "ising", "manifold": "torus", "anyons": [{"id": "1", "charge": "sigma"}]}, indent=2) + "\n"
    return docs


# (golden name, argv) pairs; paths are relative to the corpus directory
RUNS = [
    ("model_check_ising", ["model", "check", "models/ising.json"]),
    ("model_check_corrupt", ["model", "check", "models/ising_corrupt_F.json"]),
    ("basis_ising6_word3", ["basis", "enum", "--system", "systems/ising6.json", "--word", "3"]),
    ("braid_ising6_double_exchange", ["braid", "apply", "--system", "systems/ising6.json",
                          "--state", "states/ising6_equal_over.json", "--word=-3,-3"]),
    ("reduce_fib4_23", ["reduce", "--system", "systems/fib4.json", "--state", "states/fib4_random.json",
                        "--bipartition", "bipartitions/fib4_23.json", "--keep", "A"]),
    ("model_check_malformed", ["model", "check", "models/malformed.json"]),
    ("entropy_torus", ["entropy", "--system", "systems/torus.json", "--state", "states/fib4_product.json",
                       "--bipartition", "bipartitions/fib4_12_34.json"]),
    ("verify_precomputed", ["verify", "--system", "systems/ising6.json", "--state", "states/ising6_mixed_over.json",
                            "--bipartition", "bipartitions/ising6_AB.json", "--keep", "A",
                            "--reduced", "reduced/ising6_over_AB_A.json"]),
    ("verify_precomputed_swapped", ["verify", "--system", "systems/ising6.json",
                                    "--state", "states/ising6_mixed_over.json",
                                    "--bipartition", "bipartitions/ising6_swapped.json", "--keep", "A",
                                    "--reduced", "reduced/ising6_over_AB_A.json"]),
    ("verify_missing_file", ["verify", "--system", "systems/nonexistent.json", "--state", "states/x.json",
                             "--bipartition", "bipartitions/x.json"]),
]
SCENARIOS = [
    ("ising6_over_AB", "systems/ising6.json", "states/ising6_equal_over.json", "bipartitions/ising6_AB.json"),
    ("ising6_under_AB", "systems/ising6.json", "states/ising6_equal_under.json", "bipartitions/ising6_AB.json"),
    ("ising6_over_CD", "systems/ising6.json", "states/ising6_equal_over.json", "bipartitions/ising6_CD.json"),
    ("ising6_under_CD", "systems/ising6.json", "states/ising6_equal_under.json", "bipartitions/ising6_CD.json"),
    ("ising6_over_123", "systems/ising6.json", "states/ising6_equal_over.json", "bipartitions/ising6_123.json"),
    ("ising6_over_ends", "systems/ising6.json", "states/ising6_equal_over.json", "bipartitions/ising6_ends.json"),
    ("fib4_product", "systems/fib4.json", "states/fib4_product.json", "bipartitions/fib4_12_34.json"),
    ("fib4_random_23", "systems/fib4.json", "states/fib4_random.json", "bipartitions/fib4_23.json"),
    ("z3_qutrits_13", "systems/z3_qutrits.json", "states/z3_random.json", "bipartitions/z3_13.json"),
    ("ising5_free_24", "systems/ising5_free.json", "states/ising5_free.json", "bipartitions/ising5_24.json"),
]
for name, system, state, part in SCENARIOS:
    base = ["--system", system, "--state", state, "--bipartition", part]
    RUNS.append((f"entropy_{name}_A", ["entropy", *base, "--keep", "A", "--renyi", "0.5,1,2,3"]))
    RUNS.append((f"entropy_{name}_B", ["entropy", *base, "--keep", "B", "--renyi", "0.5,1,2,3"]))
    RUNS.append((f"verify_{name}", ["verify", *base]))


def run(argv, cwd: Path) -> str:
    """Run the CLI in-process from ``cwd``; the golden text holds stdout plus the exit code."""
    import os

    out, err = _io.StringIO(), _io.StringIO()
    old = os.getcwd()
    os.chdir(cwd)
    try:
        code = main(argv, out, err)
    finally:
        os.chdir(old)
    return out.getvalue() + err.getvalue() + f"[exit {code}]\n"


def main_script(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--check", action="store_true")
    args = p.parse_args(argv)
    if not args.check:
        for rel, text in documents().items():
            _write(ROOT / rel, text)
    bad = []
    for name, argv_ in RUNS:
        text = run(argv_, ROOT)
        path = ROOT / "golden" / f"{name}.txt"
        if args.check:
            if not path.exists() or path.read_text() != text:
                bad.append(name)
        else:
            _write(path, text)
    for name in bad:
        print(f"golden mismatch: {name}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main_script())
