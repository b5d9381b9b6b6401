"""Generate the bundled FCIDUMP fixtures (STO-3G, RHF canonical orbitals).

Usage: python scripts/gen_fixtures.py [outdir]

H2 at 0.7414 A, linear H4 and H6 chains on a 0.5..2.0 A grid, and N2 on a
0.9..2.7 A grid with the 1s/2s-derived orbitals frozen (6 electrons in 6
orbitals, D2h-symmetric RHF). Frozen-core energy is folded into the core-energy record.
"""
import os
import sys

import numpy as np
from pyscf import gto, scf, mcscf, ao2mo
from pyscf.tools import fcidump


def chain(n, r):
    return [["H", (0.0, 0.0, i * r)] for i in range(n)]


def run_rhf(mol, dm0=None, follow=True):
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.conv_tol_grad = 1e-10
    mf.max_cycle = 500
    mf.kernel(dm0)
    if not mf.converged:
        mf = scf.newton(mf)
        mf.kernel(mf.make_rdm1())
    # stability check; follow internal instabilities
    for _ in range(5 if follow else 0):
        mo, _, stable, _ = mf.stability(return_status=True)
        if stable:
            break
        dm = mf.make_rdm1(mo, mf.mo_occ)
        mf.kernel(dm)
    return mf


def write_full(path, mol, mf):
    fcidump.from_scf(mf, path, tol=1e-15)


def write_cas(path, mf, ncas, nelecas):
    mc = mcscf.CASCI(mf, ncas, nelecas)
    h1, ecore = mc.get_h1eff()
    eri = ao2mo.restore(1, mc.get_h2eff(), ncas)
    fcidump.from_integrals(path, h1, eri, ncas, nelecas, nuc=ecore, ms=0, tol=1e-15)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    os.makedirs(out, exist_ok=True)

    mol = gto.M(atom=chain(2, 0.7414), basis="sto-3g", verbose=0)
    write_full(os.path.join(out, "h2_0.7414.fcidump"), mol, run_rhf(mol))

    grid = [round(0.5 + 0.1 * i, 1) for i in range(16)]
    for n in (4, 6):
        dm = None
        for r in grid:
            mol = gto.M(atom=chain(n, r), basis="sto-3g", verbose=0)
            mf = run_rhf(mol, dm)
            dm = mf.make_rdm1()
            write_full(os.path.join(out, f"h{n}_{r:.1f}.fcidump"), mol, mf)

    # N2 keeps the D2h-symmetric RHF; the lower broken-symmetry solutions past
    # 1.4 A give a reference determinant with almost no ground-state weight
    for r in [round(0.9 + 0.1 * i, 1) for i in range(19)]:
        mol = gto.M(atom=[["N", (0, 0, 0)], ["N", (0, 0, r)]], basis="sto-3g", verbose=0, symmetry="D2h")
        mf = run_rhf(mol, follow=False)
        write_cas(os.path.join(out, f"n2_{r:.1f}.fcidump"), mf, 6, 6)


if __name__ == "__main__":
    main()
