#!/usr/bin/env python3
"""Smoke test for the iterflow_py extension module.

Build the module first:

    cargo build --release -p iterflow-py

The script locates the cdylib under target/, stages it as an importable
module, and exercises the main surface.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def stage_module() -> Path:
    candidates = [
        ROOT / "target" / "release" / "libiterflow_py.so",
        ROOT / "target" / "debug" / "libiterflow_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("libiterflow_py.so not found; run `cargo build --release -p iterflow-py` first")
    stage = Path(tempfile.mkdtemp(prefix="iterflow-py-"))
    shutil.copy2(lib, stage / "iterflow_py.so")
    return stage


sys.path.insert(0, str(stage_module()))
import iterflow_py as itf  # noqa: E402


def approx_equal(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


# Catalog and evaluators.
moebius = itf.Map.catalog("moebius")
approx_equal(moebius.exact_flow(2.0, 0.1), 0.125, 1e-15)
approx_equal(moebius.apply_n(3, 0.1), 0.1 / 0.7, 1e-15)

logistic = itf.Map.catalog("logistic", 2.0)
approx_equal(logistic.forward(0.3), 0.42, 1e-15)
approx_equal(logistic.inverse(0.42), 0.3, 1e-15)

# Exact flow coefficients are powers of t for the moebius map.
flow = itf.Flow.solve_exact(moebius, 6)
assert flow.coeff_strings() == ["1", "t", "t^2", "t^3", "t^4", "t^5"]
clean, _ = flow.verify()
assert clean

# The velocity series of that flow is x^2.
assert flow.velocity_strings() == ["0", "1", "0", "0", "0", "0"]

# Numeric logistic flow at t = 1 reproduces the map itself.
nflow = itf.Flow.solve_numeric(logistic, 1.0, 6)
coeffs = nflow.coeffs_at(1.0)
approx_equal(coeffs[0], 2.0, 1e-12)
approx_equal(coeffs[1], -2.0, 1e-12)

# Functional square root: applying the half-step twice recovers the map.
half = itf.iterate(logistic, 0.5, 0.3, 5, 7)
again = itf.iterate(logistic, 0.5, half, 5, 7)
approx_equal(again, 0.42, 1e-9)

# Headline accuracy of the conjugated series against the closed flow.
r = itf.relative_error(logistic, 0.5, 0.25, 5, 7)
assert abs(r) <= 3e-12, r

# Successive differences shrink with depth for the sine.
sine = itf.Map.catalog("sine")
s5 = abs(itf.successive_difference(sine, 0.5, 1.0, 9, 5))
s4 = abs(itf.successive_difference(sine, 0.5, 1.0, 9, 4))
assert s5 < s4

# Extrema table follows (pi/2)^(1 - sqrt t).
rows = itf.extrema([0.25])
t, computed, reference, rel = rows[0]
approx_equal(reference, math.sqrt(math.pi / 2), 1e-12)
assert abs(rel) < 5e-3

# Radius diagnostics skip the sine's even (zero) coefficients.
sflow = itf.Flow.solve_exact(sine, 9)
pts = dict(itf.radius_estimates(sflow, 0.5, 2, 9))
assert pts[2] is None and pts[3] is not None

# Schröder data: Koenigs series of the lambda=2 logistic map and the
# parabolic expansions.
b = itf.koenigs_coeffs(logistic, 8)
approx_equal(b[2], 4.0 / 3.0, 1e-12)
approx_equal(itf.koenigs_flow(logistic, 40, 0.5, 0.1), logistic.exact_flow(0.5, 0.1), 1e-9)

rho, terms = itf.parabolic_psi(sine, 9)
assert rho == "6/5"
assert (2, "79/1050") in terms

leading = itf.leading_error_logistic2(0.5, 0.25, 5, 7)
assert abs(leading - itf.relative_error(logistic, 0.5, 0.25, 5, 7)) < 1e-13

print("smoke test passed")
