"""Independent brute-force references used to check the closed forms."""

import cmath


def bounce_cavity_fields(phi_n, phi_e, r_n=1.0, r_e=1.0, r2=1.0, phi2=0.0,
                         theta=0.0, max_iter=100000, tol=1e-14):
    """Cavity amplitudes by explicit round-trip summation.

    Iterates the coupling relations: each cavity is seeded through the two
    splitters and re-fed every round trip by its own retro-reflection plus
    the cross term through the second internal mirror.  Converges when the
    round-trip map is a contraction.
    """
    a = r_n * r2 * cmath.exp(1j * (phi_n + phi2))
    b = r_e * r2 * cmath.exp(1j * (phi_e + phi2))
    seed = cmath.exp(1j * theta) / 2.0
    e_n = e_e = 0.0 + 0.0j
    for _ in range(max_iter):
        new_n = seed + 0.5 * a * e_n - 0.5 * b * e_e
        new_e = seed + 0.5 * b * e_e - 0.5 * a * e_n
        if abs(new_n - e_n) + abs(new_e - e_e) < tol:
            return new_n, new_e
        e_n, e_e = new_n, new_e
    return e_n, e_e


def bounce_spectral_radius(phi_n, phi_e, r_n=1.0, r_e=1.0, r2=1.0, phi2=0.0):
    """Largest eigenvalue magnitude of the round-trip map."""
    a = r_n * r2 * cmath.exp(1j * (phi_n + phi2))
    b = r_e * r2 * cmath.exp(1j * (phi_e + phi2))
    return abs(a + b) / 2.0
