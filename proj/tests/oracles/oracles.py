"""Independent reference values for the frozen constants in the unit tests.

Each value is computed here by direct numerical integration (scipy) in
coordinates unrelated to the engines in src/, then pasted into the tests.
Run: python3 tests/oracles/oracles.py
"""
import math

import numpy as np
from scipy import integrate


def critical_mass(n, s, eps, a):
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)  # |S^{N-1}|
    c1 = 0.5 - (1 + eps) ** -(n + s - 1)
    c2 = area * (1 + eps) ** (1 - s) / (1 - s)
    return (c2 + a) / c1


def ball_perimeter_2d(s):
    # x at radius rho; distance to the circle along angle th is t(th).
    # int_{B^c} |x-y|^{-(2+s)} dy = int_0^{2pi} t^{-s}/s dth.
    def inner(rho):
        f = lambda th: (-rho * math.cos(th) + math.sqrt(1 - (rho * math.sin(th)) ** 2)) ** -s / s
        return integrate.quad(f, 0, 2 * math.pi, points=[math.pi], limit=400, epsabs=1e-13)[0]
    return integrate.quad(lambda r: 2 * math.pi * r * inner(r), 0, 1, limit=400, epsabs=1e-11)[0]


def ball_perimeter_3d(s):
    # Same in R^3 with the polar angle measured from the radial direction.
    def inner(rho):
        f = lambda c: 2 * math.pi * (-rho * c + math.sqrt(1 - rho * rho * (1 - c * c))) ** -s / s
        return integrate.quad(f, -1, 1, limit=400, epsabs=1e-13)[0]
    return integrate.quad(lambda r: 4 * math.pi * r * r * inner(r), 0, 1, limit=400, epsabs=1e-11)[0]


def disk_riesz_self():
    # 1/2 int_D int_D |x-y|^{-1}: potential of the unit disk at radius rho.
    def pot(rho):
        f = lambda th: (-rho * math.cos(th) + math.sqrt(1 - (rho * math.sin(th)) ** 2))
        return integrate.quad(f, 0, 2 * math.pi, limit=400, epsabs=1e-13)[0]
    return 0.5 * integrate.quad(lambda r: 2 * math.pi * r * pot(r), 0, 1, limit=400, epsabs=1e-12)[0]


def lens_area(r1, r2, rho):
    if rho >= r1 + r2:
        return 0.0
    if rho <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    x1 = (rho * rho + r1 * r1 - r2 * r2) / (2 * rho)

    def seg(r, h):
        a = r - h
        return r * r * math.acos(a / r) - a * math.sqrt(max(0.0, 2 * r * h - h * h))
    return seg(r1, r1 - x1) + seg(r2, r2 - (rho - x1))


def disk_cross(r1, r2, d, q):
    # int_{B(0,r1)} int_{B(d e1,r2)} |x-y|^{-q} = int lens(|z|) |z + d e1|^{-q} dz.
    def ring(rho):
        return integrate.quad(lambda th: (d * d + rho * rho + 2 * d * rho * math.cos(th)) ** (-q / 2),
                              0, 2 * math.pi, points=[math.pi], limit=500, epsabs=1e-13)[0]
    return integrate.quad(lambda rho: lens_area(r1, r2, rho) * rho * ring(rho), 0, r1 + r2,
                          limit=500, epsabs=1e-12)[0]


def square_perimeter(s):
    # Unit square: int_Q (1/s) int_0^{2pi} t(x, th)^{-s} dth dx, split into the
    # eight triangles of symmetry; t is the exit distance along th.
    def exit_dist(x, y, th):
        c, sn = math.cos(th), math.sin(th)
        tx = (1 - x) / c if c > 0 else (-x / c if c < 0 else math.inf)
        ty = (1 - y) / sn if sn > 0 else (-y / sn if sn < 0 else math.inf)
        return min(tx, ty)

    def inner(x, y):
        f = lambda th: exit_dist(x, y, th) ** -s / s
        corners = sorted(math.atan2(cy - y, cx - x) % (2 * math.pi) for cx, cy in ((0, 0), (1, 0), (0, 1), (1, 1)))
        return integrate.quad(f, 0, 2 * math.pi, points=corners, limit=400, epsabs=1e-12)[0]
    # triangle 0 <= y <= x <= 1/2
    v = integrate.dblquad(lambda y, x: inner(x, y), 0, 0.5, 0, lambda x: x, epsabs=1e-9, epsrel=1e-9)[0]
    return 8 * v


def general_root(n, s, eps, a, beta, q_exp=None):
    # phi(x) = C1 x^{1+p} - C2 x^p - A C3 with p = (beta - 1)/N.
    from scipy.optimize import brentq
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    vol = area / n
    q = n + s - 1 if q_exp is None else q_exp
    c1 = 0.5 - (1 + eps) ** -q
    c2 = area * (1 + eps) ** (1 - s) / (1 - s)
    p = (beta - 1) / n
    c3 = area * vol ** (-1 + p) / (n + 1 - beta)
    f = lambda x: c1 * x ** (1 + p) - c2 * x ** p - a * c3
    return brentq(f, 1e-9, 1e9, xtol=1e-14, rtol=1e-15)


if __name__ == "__main__":
    print("m_c(3, .5, .5, 0)          ", repr(critical_mass(3, 0.5, 0.5, 0.0)))
    print("m_c(2, .5, 1, 2)           ", repr(critical_mass(2, 0.5, 1.0, 2.0)))
    print("P(B1) N=2 s=.5             ", repr(ball_perimeter_2d(0.5)))
    print("P(B1) N=3 s=.5             ", repr(ball_perimeter_3d(0.5)))
    print("V(B1) N=2                  ", repr(disk_riesz_self()))
    print("V(B1) N=3 = 16 pi^2/15     ", repr(16 * math.pi ** 2 / 15))
    print("cross riesz disks 1,.7,1.7 ", repr(disk_cross(1.0, 0.7, 1.7, 1.0)))
    print("cross K s=.5 disks 1,.7,1.7", repr(disk_cross(1.0, 0.7, 1.7, 2.5)))
    print("P(unit square) s=.5        ", repr(square_perimeter(0.5)))
    print("m_p(3, .5, .5, A=2, b=0)   ", repr(general_root(3, 0.5, 0.5, 2.0, 0.0)))
    print("m_p(2, .5, 1, A=1, b=2.5)  ", repr(general_root(2, 0.5, 1.0, 1.0, 2.5)))
    print("m_c(3,.5,.5,0) appendix    ", repr(general_root(3, 0.5, 0.5, 0.0, 1.0, q_exp=3 + 1 - 0.5)))
