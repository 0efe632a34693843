"""Regenerate src/tokq/data/h2_coefficients.csv.

Builds the STO-3G H2 qubit Hamiltonian with PySCF + OpenFermion, applies the
Bravyi-Kitaev transform and removes the two qubits that only carry Z
operators (fixed to their Hartree-Fock eigenvalues). The remaining qubits are
relabelled so the Hartree-Fock determinant is |01> (qubit0=0, qubit1=1).

Not a runtime dependency of tokq; run once and commit the CSV.

    pip install pyscf openfermion
    python tools/make_h2_table.py
"""
import csv
from pathlib import Path

import numpy as np
import openfermion as of
from pyscf import ao2mo, gto, scf

OUT = Path(__file__).resolve().parents[1] / "src" / "tokq" / "data" / "h2_coefficients.csv"

# reduced qubit label -> BK qubit
RELABEL = {0: 2, 1: 0}
TERMS = [(), ((0, "Z"),), ((1, "Z"),), ((0, "Z"), (1, "Z")), ((0, "X"), (1, "X")), ((0, "Y"), (1, "Y"))]


def bk_hamiltonian(r):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
    two = np.asarray(eri.transpose(0, 2, 3, 1), order="C")
    one_so, two_so = of.chem.molecular_data.spinorb_from_spatial(h1, two)
    op = of.InteractionOperator(mol.energy_nuc(), one_so, 0.5 * two_so)
    return of.bravyi_kitaev(of.get_fermion_operator(op))


def taper(qop):
    # HF occupation [1,1,0,0] -> BK bits [1,0,0,0]; Z1 = Z3 = +1
    out = {}
    for term, coeff in qop.terms.items():
        kept = []
        for q, p in term:
            if q in (1, 3):
                assert p == "Z", term
                continue
            kept.append((q, p))
        key = tuple(sorted(kept))
        out[key] = out.get(key, 0.0) + coeff
    return out


def row(r):
    red = taper(bk_hamiltonian(r))
    inv = {v: k for k, v in RELABEL.items()}
    relabelled = {}
    for key, coeff in red.items():
        if abs(coeff) < 1e-14:
            continue
        new = tuple(sorted((inv[q], p) for q, p in key))
        relabelled[new] = relabelled.get(new, 0.0) + coeff
    g = []
    for t in TERMS:
        c = relabelled.pop(t, 0.0)
        assert abs(c.imag) < 1e-12
        g.append(float(c.real))
    assert all(abs(c) < 1e-12 for c in relabelled.values()), relabelled
    return g


def main():
    grid = np.round(np.arange(0.20, 2.85 + 1e-9, 0.05), 2)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "g0", "g1", "g2", "g3", "g4", "g5"])
        for r in grid:
            w.writerow([f"{r:.2f}"] + [repr(x) for x in row(float(r))])
    print(f"wrote {len(grid)} rows to {OUT}")


if __name__ == "__main__":
    main()
