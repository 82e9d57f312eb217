"""
Eigenvalues of the semi-discrete penalized operator.

The right-hand side is linear once the boundary data is zeroed, so it is
assembled column by column into a dense matrix. Its eigenvalues, scaled by
the time step, must lie inside the RK4 stability region. The strongly
damped eigenvalues come from the penalty (about -1/eta); the rest sit near
the imaginary axis.

Run:  python3 demos/05_stability_spectrum.py [outdir]
"""

import os
import sys

from fourier_penalty import cases
from fourier_penalty.stability import assemble_operator, check_rk4_containment, spectrum, write_eigs_csv

out = sys.argv[1] if len(sys.argv) > 1 else None
for case, N, m in [("gauss1d", 128, 0), ("gauss1d", 128, 1), ("tm_circle", 16, 0)]:
    setup = cases.setup_case(cases.get_case(case, m=m), N)
    eigs = spectrum(assemble_operator(setup.problem))
    _, dt = setup.run.resolve(setup.grid.dx)
    rep = check_rk4_containment(eigs, dt)
    print(f"{case} N={N} m={m}: {eigs.size} eigenvalues, min Re*dt={eigs.real.min() * dt:.2f}, "
          f"max Re={eigs.real.max():.2e}, verdict {rep.verdict}")
    if out:
        os.makedirs(out, exist_ok=True)
        write_eigs_csv(os.path.join(out, f"eigs_{case}_N{N}_m{m}.csv"), eigs, rep)
