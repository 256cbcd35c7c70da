"""Independent simple-wave oracle for the moving-medium law.

Builds the frame from first principles with numpy (no shockform code) and
prints the constants frozen in the C++ tests.
"""
import numpy as np
from scipy.optimize import brentq, minimize_scalar


def metric(psi, a):
    # g = -dt^2 + (dx1 + a psi dt)^2 + dx2^2
    g = np.diag([-1.0, 1.0, 1.0])
    g[0, 0] += (a * psi) ** 2
    g[0, 1] = g[1, 0] = a * psi
    G = np.zeros((3, 3))
    G[0, 0] = 2 * a * a * psi
    G[0, 1] = G[1, 0] = a
    return g, G


def frame(psi, a):
    g, G = metric(psi, a)
    gi = np.linalg.inv(g)
    # du = (p, -1, 0) with gi(du, du) = 0, future-directed root
    A, B, C = gi[0, 0], 2 * gi[0, 1] * -1.0, gi[1, 1]
    roots = np.roots([A, B, C])
    p = max(r.real for r in roots)
    du = np.array([p, -1.0, 0.0])
    mu = -1.0 / (gi[0] @ du)
    L = -mu * (gi @ du)
    X = -L - gi[0]
    return g, G, mu, L, X


def coefficient(u, amp, a, power):
    y = (u - 0.5) / 0.5
    P = amp * np.cos(np.pi * y / 2) ** power
    dP = amp * power * np.cos(np.pi * y / 2) ** (power - 1) * -np.sin(np.pi * y / 2) * np.pi / 2 / 0.5
    g, G, mu, L, X = frame(P, a)
    xb_psi = mu * X[1] * (-dP)  # d1 psi = -P'(u)
    return 0.5 * (L @ G @ L) * xb_psi, mu


def delta_star(amp, a=1.0, power=3):
    res = minimize_scalar(lambda u: coefficient(u, amp, a, power)[0], bounds=(0.5, 1.0), method="bounded",
                          options={"xatol": 1e-13})
    return max(0.0, -res.fun), res.x


if __name__ == "__main__":
    amp = brentq(lambda A: delta_star(A)[0] - 0.5, 0.01, 0.3, xtol=1e-15)
    d, u = delta_star(amp)
    mu0 = coefficient(u, amp, 1.0, 3)[1]
    print(f"amplitude {amp:.15g} delta {d:.15g} u_star {u:.15g} mu0 {mu0:.15g} T {mu0 / d:.15g}")
    # quadratic A = diag(0,1,0) at psi = 0.1: spatial inverse and mu
    print("mu(psi=0.1, A=diag(0,1,0))", f"{np.sqrt(1.1):.15g}")
