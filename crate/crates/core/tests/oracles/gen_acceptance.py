"""Reference values e^{z^2} erfc(-z) on a polar grid, for the acceptance suite.

Run with mpmath installed; paste the printed table into tests/acceptance.rs.
"""
from mpmath import mp, mpc, exp, erfc, pi, cos, sin

mp.dps = 40
print("const ERFC_TABLE: &[(f64, f64, f64, f64)] = &[")
for r in [0.25, 0.75, 1.5, 2.25, 3.0]:
    for j in range(9):
        th = pi * j / 8
        z = mpc(r * cos(th), r * sin(th))
        z = mpc(float(z.real), float(z.imag))
        w = exp(z * z) * erfc(-z)
        print(f"    ({float(z.real)!r}, {float(z.imag)!r}, {mp.nstr(w.real, 20)}, {mp.nstr(w.imag, 20)}),")
print("];")
