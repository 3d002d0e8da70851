"""Smoke test for the momentray extension module.

Build and install first:  pip install --no-build-isolation -e crates/python
Then run:                 python crates/python/python/smoke_test.py
"""

import math
import sys

import momentray as mr


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert mr.exponents(2) == ("3/2", "3")
    assert mr.exponents(3) == ("3/2", "2")
    assert mr.region(3, "2/3", "1/2") == "boundary"
    assert mr.region(3, 2 / 3, 0.5) == "interior"
    assert mr.region(3, 0.5, 0.5) == "boundary"
    assert mr.region(3, "0.45", 0.4) == "interior"
    assert mr.region(3, 0.1, 0.9) == "outside"

    x = [0.3, -0.2, 0.5]
    y = mr.gamma(x, 0.7)
    assert len(y) == 3
    numeric, closed = mr.jacobian("phi", [0.1, 0.4], [0.9, -0.6])
    assert close(abs(numeric), abs(closed), 1e-6), (numeric, closed)

    est = mr.estimate_c_d("psi", 4, samples=50, seed=3)
    assert est["dispersion"] < 1e-6 and close(abs(est["mean"]), 1.0, 1e-6), est

    unit = mr.BoxSet.unit(2)
    assert unit.measure() == 1.0 and len(unit) == 1
    t = mr.bilinear_form(unit, unit)
    assert close(t, 0.75, 1e-6), t
    assert close(mr.adjoint_pairing(unit, unit), t, 1e-3)

    rep = mr.rwt(unit, unit)
    assert close(rep["verdict"], 64 / 27, 1e-6), rep

    halves = mr.BoxSet(2, [([0, 0], [1, 0.5]), ([0, 0.5], [1, 1])])
    f = mr.SimpleFunction(2, [(1.0, mr.BoxSet(2, [([0, 0], [1, 0.5])])), (2.0, mr.BoxSet(2, [([0, 0.5], [1, 1])]))])
    assert close(f.lorentz_norm(2.0, 2.0), f.lp_norm(2.0), 1e-12)
    assert f([0.5, 0.75]) == 2.0 and halves.contains([0.5, 0.75])
    chi = mr.SimpleFunction.indicator(unit)
    assert close(chi.lorentz_norm(1.5, math.inf), 1.0, 1e-12)

    sc = mr.scaling(2, n_list=[16, 32, 64, 128])
    assert len(sc["rows"]) == 4
    lo = mr.necessity(2, 1.35)
    hi = mr.necessity(2, 1.65)
    assert lo["verdict"] == "unbounded" and hi["verdict"] == "bounded", (lo["verdict"], hi["verdict"])

    ids = mr.corpus_ids()
    assert len(ids) == 32
    e, g, rng = mr.corpus_entry("slab-2-02")
    tower = mr.refine(e, g, side="f", range=rng)
    assert tower["integral"] > 0 and tower["structure"]["passed"] == tower["structure"]["sampled"]
    sweep = mr.level_sweep("e", unit, unit)
    assert all(step["report"]["ratio"] > 0 for step in sweep)

    try:
        mr.BoxSet(1, [([0], [1])])
    except ValueError:
        pass
    else:
        raise AssertionError("dimension 1 accepted")

    if "--acceptance" in sys.argv:
        report = mr.acceptance(seed=7)
        for c in report["criteria"]:
            print(("PASS" if c["passed"] else "FAIL"), c["id"], c["name"])
        assert all(c["passed"] for c in report["criteria"])

    print("momentray", mr.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
