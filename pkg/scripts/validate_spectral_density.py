#!/usr/bin/env python3
"""One-off numerical validation of the closed-form spectral densities.

The runtime code uses the analytically evaluated Fourier transforms of the
field correlation functions. This script rebuilds them by brute force: the
time integral of e^{i zeta t} against the mode integral is regulated by an
exponential damping e^{-eps|t|} (and a mode cutoff K), which turns the
distributional transform into a Lorentzian smearing of the mode density,

    g_eps(zeta) = (1/4 pi^2) Int_m^K dk  w(k) * 2 eps / ((zeta-k)^2 + eps^2),

with w(k) = sqrt(k^2 - m^2) for the same-qubit correlation and
w(k) = sin(L sqrt(k^2 - m^2)) / L for the cross one. As eps -> 0 at fixed
cutoff this converges to the closed forms used in massbath. The Lorentzian
is flattened exactly by the substitution k = zeta + eps*tan(theta) so the
quadrature sees a smooth integrand.

Not part of the package or the test suite; run directly:

    python3 scripts/validate_spectral_density.py
"""

import math
import sys

from scipy.integrate import quad

from massbath import spectral_density

EPS = 1e-6
CUTOFF = 1e4
RTOL = 1e-3


def smeared(zeta: float, mass: float, separation: float) -> tuple[float, float]:
    def w_same(k: float) -> float:
        return math.sqrt(max(k * k - mass * mass, 0.0))

    def w_cross(k: float) -> float:
        q = math.sqrt(max(k * k - mass * mass, 0.0))
        if separation * q < 1e-8:
            return q
        return math.sin(separation * q) / separation

    theta_lo = math.atan2(mass - zeta, EPS)
    theta_hi = math.atan2(CUTOFF - zeta, EPS)
    norm = 2.0 / (4.0 * math.pi**2)

    def integrate(weight) -> float:
        def integrand(theta: float) -> float:
            return weight(zeta + EPS * math.tan(theta))

        value, _ = quad(integrand, theta_lo, theta_hi, limit=400)
        return norm * value

    return integrate(w_same), integrate(w_cross)


def main() -> int:
    cases = [
        (1.0, 0.0, 1.0),
        (1.0, 0.6, 1.0),
        (1.0, 0.6, 5.0),
        (2.0, 0.6, 2.0),
        (1.0, 0.995, 3.0),
        (1.5, 0.995, 0.3),
    ]
    print(f"{'zeta':>6} {'mass':>6} {'L':>5} {'route':>6} "
          f"{'closed form':>16} {'quadrature':>16} {'rel dev':>10}")
    ok = True
    for zeta, mass, sep in cases:
        closed = spectral_density(zeta, mass, sep)
        numeric = smeared(zeta, mass, sep)
        for name, x, y in (("same", closed[0], numeric[0]),
                           ("cross", closed[1], numeric[1])):
            dev = abs(x - y) / max(abs(x), abs(y))
            ok = ok and dev < RTOL
            print(f"{zeta:6.2f} {mass:6.3f} {sep:5.2f} {name:>6} "
                  f"{x:16.9e} {y:16.9e} {dev:10.2e}")
    print("PASS" if ok else "FAIL", f"(relative tolerance {RTOL})")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
