"""Regenerate the FCIDUMP fixtures and the reference values in manifest.json.

Requires PySCF. Run from the repository root:  python3 fixtures/generate_fixtures.py
"""
import json
import os

import pyscf
from pyscf import gto, scf, mcscf, mrpt
from pyscf.tools import fcidump

HERE = os.path.dirname(os.path.abspath(__file__))


def chain(n, spacing):
    return [("H", (0.0, 0.0, i * spacing)) for i in range(n)]


FIXTURES = [
    # name, atoms, basis, spin, list of (core, active) CAS choices
    ("h2_r0.74_sto3g", chain(2, 0.74), "sto-3g", 0, [(0, 2)]),
    ("h2_r2.00_sto3g", chain(2, 2.00), "sto-3g", 0, [(0, 2)]),
    ("h3_r1.00_sto3g", chain(3, 1.00), "sto-3g", 1, [(0, 3)]),
    ("h4_r1.00_sto3g", chain(4, 1.00), "sto-3g", 0, [(0, 4), (1, 2)]),
    ("h5_r1.00_sto3g", chain(5, 1.00), "sto-3g", 1, [(0, 5)]),
    ("h6_r1.00_sto3g", chain(6, 1.00), "sto-3g", 0, [(2, 2), (1, 4)]),
    ("lih_r1.60_sto3g", [("Li", (0, 0, 0)), ("H", (0, 0, 1.60))], "sto-3g", 0, [(1, 2), (0, 4)]),
    ("lih_r1.40_sto3g", [("Li", (0, 0, 0)), ("H", (0, 0, 1.40))], "sto-3g", 0, [(1, 2)]),
    ("lih_r2.00_sto3g", [("Li", (0, 0, 0)), ("H", (0, 0, 2.00))], "sto-3g", 0, [(1, 2)]),
]


def main():
    manifest = {"generator": {"pyscf": pyscf.__version__}, "fixtures": []}
    for name, atoms, basis, spin, cas_list in FIXTURES:
        mol = gto.M(atom=atoms, basis=basis, spin=spin, unit="Angstrom", symmetry=False, verbose=0)
        mf = (scf.RHF(mol) if spin == 0 else scf.ROHF(mol))
        mf.conv_tol = 1e-12
        mf.kernel()
        if not mf.converged:
            raise RuntimeError(f"SCF did not converge for {name}")
        path = os.path.join(HERE, f"{name}.fcidump")
        fcidump.from_mo(mol, path, mf.mo_coeff, tol=1e-15, float_format=" %.17g")
        entry = {
            "name": name,
            "fcidump": f"fixtures/{name}.fcidump",
            "basis": basis,
            "geometry_angstrom": [[a, list(map(float, c))] for a, c in atoms],
            "norb": int(mf.mo_coeff.shape[1]),
            "nelec": int(mol.nelectron),
            "ms2": int(spin),
            "e_scf": float(mf.e_tot),
            "cas": [],
        }
        for ncore, nact in cas_list:
            nelecas = mol.nelectron - 2 * ncore
            mc = mcscf.CASCI(mf, nact, nelecas)
            mc.fcisolver.conv_tol = 1e-14
            mc.kernel()
            cas = {"core": ncore, "active": nact, "e_casci": float(mc.e_tot)}
            if spin == 0 and ncore + nact < mol.nao:
                cas["e_sc_nevpt2"] = float(mrpt.NEVPT(mc).kernel())
            entry["cas"].append(cas)
        manifest["fixtures"].append(entry)
    with open(os.path.join(HERE, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
