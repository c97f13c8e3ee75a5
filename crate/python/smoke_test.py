# Copyright 2026 The memorymodes Authors
# SPDX-License-Identifier: Apache-2.0
"""Quick end-to-end check of the Python bindings."""

import math
import pathlib
import sys
import tempfile

import memorymodes as mm

ROOT = pathlib.Path(__file__).resolve().parent.parent


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    model = mm.LorentzianModel(0.0, 2.4, 0.6, math.sqrt(0.15))
    grid = mm.TimeGrid(0.0, 10.0, 4000)
    assert len(grid) == 4001

    amps = mm.propagate(model, grid)
    rates = mm.decay_rates(model, grid)
    gamma = [g for g, ok in zip(rates["gamma"], rates["valid"]) if ok]
    assert min(gamma) < 0.0, "expected a negative decay rate"

    ident = mm.memory_identity(model, grid)
    assert ident["max_relative_residual"] < 1e-6

    e0 = [[0, 0, 0], [0, 0, 0], [0, 0, 1]]
    lind = mm.evolve_lindblad(model, grid, e0)
    for k in range(0, len(grid), 400):
        c1 = amps["states"][k][0]
        assert close(lind["states"][k][2][2].real, abs(c1) ** 2, 1e-8)
        assert mm.mutual_information(lind["states"][k]) >= -1e-9

    local = mm.evolve_timelocal(model, grid, [[0, 0], [0, 1]])
    assert close(local["states"][-1][1][1].real, abs(amps["states"][-1][0]) ** 2, 1e-6)
    assert close(mm.von_neumann_entropy([[0.5, 0], [0, 0.5]]), math.log(2), 1e-12)

    n = 20000
    nmqj = mm.run_nmqj(model, grid, n, seed=1)
    mcwf = mm.run_mcwf(model, grid, n, seed=2)
    assert all(a + b == n for a, b in zip(nmqj["n0"], nmqj["n1"]))
    assert sum(nmqj["reverse"]) > 0
    for k in range(400, len(grid), 400):
        p = 1.0 - abs(amps["states"][k][0]) ** 2
        sigma = math.sqrt(p * (1.0 - p) / n)
        assert abs(nmqj["ground_population"][k] - p) < 5 * sigma
        assert abs(mcwf["ground_population"][k] - p) < 5 * sigma

    gap = mm.BandGapModel(0.0, 0.0, 2.0, 1.0, 4.0, 2.0, 1.0)
    assert gap.is_perfect_gap() and gap.constants()["gamma_p1"] == 0.0
    assert mm.intermode_identity(gap, grid)["max_relative_residual"] < 1e-6
    try:
        mm.BandGapModel(0.0, 0.0, 1.5, 1.0, 4.0, 2.0, 1.0)
    except ValueError as err:
        assert "Gamma'1" in str(err)
    else:
        raise AssertionError("non-physical model accepted")

    with tempfile.TemporaryDirectory() as out:
        manifest = dict(mm.run_experiment("fig2", ROOT / "presets" / "fig2.conf", out))
        assert manifest["experiment"] == "fig2"
        assert (pathlib.Path(out) / "rates.csv").exists()

    print(f"memorymodes {mm.__version__}: smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
