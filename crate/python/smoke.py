"""Smoke test for the adapt_rdm_py extension.

    pip install --no-build-isolation -e crates/python
    python python/smoke.py
"""

import math
import sys

import adapt_rdm_py as ar


def main() -> int:
    h2 = ar.Hamiltonian.from_fixture("h2", 0.7414)
    e_fci = h2.fci_energies(1)[0]
    assert abs(e_fci + 1.1373) < 1e-3, e_fci

    h4 = ar.Hamiltonian.from_fixture("h4", 1.0)
    e0, e1 = h4.fci_energies(2)
    for variant, n_update in [("adapt", 1), ("adapt_rdm", 1), ("adapt_v", 30)]:
        res = ar.run_adapt(h4, variant, n_update)
        print(f"{variant:<10} E = {res.energy:.10f}  error = {(res.energy - e0) * 1e3:.2e} mHa  "
              f"N_s = {res.n_parameters}  {res.convergence}")
        assert res.energy >= e0 - 1e-9
        assert len(res.energies) == res.n_iterations
        assert len(res.operators) == res.n_parameters

    exc = ar.first_excited(h4, epsilon=2e-5)
    print(f"S1         E = {exc.energy:.10f}  error = {exc.energy - e1:.2e} Ha")
    assert abs(exc.energy - e1) < 1e-6

    assert math.isclose(ar.npe([0.1, -0.2, 0.3]), 0.5)
    assert 1.5 in ar.geometries("h6")
    try:
        ar.run_adapt(h4, "nonsense")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown variant accepted")
    print("smoke: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
