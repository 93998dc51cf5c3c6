"""Independent reference computations used by the test suite.

Nothing here calls the FFT-based paths under test.
"""

import itertools

import numpy as np


def modes(f, keep=None):
    """Nonzero (k1, k2, coefficient) triples of a SpectralField."""
    g = f.grid
    out = []
    for i, j in zip(*np.nonzero(f.coeffs)):
        if keep is not None and not keep[i, j]:
            continue
        out.append((int(g.k1[i]), int(g.k2[j]), f.coeffs[i, j]))
    return out


def advection_by_convolution(theta, keep=None):
    """Coefficients of u . grad theta from an explicit sum over mode pairs.

    ``keep`` restricts both inputs and output to a boolean mode mask
    (the dealiasing band).  Result is a dict {(k1, k2): coefficient}.
    """
    g = theta.grid
    c1, c2 = 2 * np.pi / g.l1, 2 * np.pi / g.l2
    m = modes(theta, keep)
    out = {}
    for (p1, p2, a), (q1, q2, b) in itertools.product(m, m):
        pabs = np.hypot(c1 * p1, c2 * p2)
        if pabs == 0:
            continue
        u1 = -1j * c2 * p2 / pabs * a
        u2 = 1j * c1 * p1 / pabs * a
        val = u1 * 1j * c1 * q1 * b + u2 * 1j * c2 * q2 * b
        key = (p1 + q1, p2 + q2)
        out[key] = out.get(key, 0.0) + val
    if keep is not None:
        out = {k: v for k, v in out.items()
               if keep[k[0] % g.n1, k[1] % g.n2] and abs(k[0]) < g.n1 // 2 and abs(k[1]) < g.n2 // 2}
    return out


def product_by_convolution(f, g_):
    """Fourier coefficients of the pointwise product f*g (no aliasing)."""
    out = {}
    for (p1, p2, a), (q1, q2, b) in itertools.product(modes(f), modes(g_)):
        key = (p1 + q1, p2 + q2)
        out[key] = out.get(key, 0.0) + a * b
    return out


def second_difference_laplacian(u, h1, h2):
    """-Laplacian by centred second differences on a periodic grid."""
    d1 = (np.roll(u, -1, 0) - 2 * u + np.roll(u, 1, 0)) / h1 ** 2
    d2 = (np.roll(u, -1, 1) - 2 * u + np.roll(u, 1, 1)) / h2 ** 2
    return -(d1 + d2)
