"""Independent numerical oracles used by the unit and acceptance tests.

Both oracles avoid the library's own curvature/eigenvalue formulas:
the eigenvalue oracle is a conservative finite-volume discretization of
the Sturm-Liouville form with Richardson extrapolation, and the collar
curvature oracle assembles scalar curvature from Christoffel symbols of
the raw diagonal 3-metric by finite differences.
"""

import numpy as np
import numpy.polynomial.legendre as npleg
from scipy.linalg import eigh_tridiagonal

from ahext import spectral


def fd_first_eigenvalue(g, n=2000, richardson=True, which=0):
    """lambda_1 of -Delta_g + K_g on g = e^{2 phi} g_*, axisymmetric sector.

    In x = cos(theta) the problem is the generalized one
        -[(1 - x^2) u']' + (1 - Delta_* phi) u = lambda e^{2 phi} u,
    discretized conservatively at cell centers x_j = -1 + h (j + 1/2);
    the degenerate flux (1 - x^2) -> 0 at x = +-1 encodes the natural
    pole condition. Symmetrized with the weight to a tridiagonal form.
    """

    def solve(nn):
        h = 2.0 / nn
        xc = -1.0 + h * (np.arange(nn) + 0.5)
        xf = -1.0 + h * np.arange(1, nn)          # interior faces
        flux = (1.0 - xf ** 2) / h ** 2
        phi_c = g.phi_coeffs
        phi = npleg.legval(xc, phi_c)
        lap_phi = npleg.legval(xc, spectral.sphere_laplacian_coeffs(phi_c))
        c = 1.0 - lap_phi
        w = np.exp(2.0 * phi)                     # weight e^{2 phi}
        diag = c.copy()
        diag[:-1] += flux
        diag[1:] += flux
        # symmetric similarity with D = diag(sqrt(w))
        d = diag / w
        e = -flux / np.sqrt(w[:-1] * w[1:])
        vals = eigh_tridiagonal(d, e, select="i",
                                select_range=(which, which))[0]
        return vals[0]

    lam = solve(n)
    if not richardson:
        return lam
    lam2 = solve(2 * n)
    return (4.0 * lam2 - lam) / 3.0


def _legendre_eval_rows(rows, x_nodes, w_nodes, x_out):
    """Fit each row (sampled at Gauss nodes) and evaluate at x_out."""
    out = np.empty((rows.shape[0], len(x_out)))
    for i, row in enumerate(rows):
        out[i] = npleg.legval(x_out, spectral.to_legendre(row, x_nodes,
                                                          w_nodes))
    return out


def fd_collar_scalar_curvature(collar, x_cap=0.9, n_x=361, t_min=0.0):
    """Brute-force scalar curvature of gamma = v^2 dt^2 + E^2 g(t).

    Builds the diagonal metric components G = (v^2, E^2 q, E^2 p) on a
    uniform (t, x) grid with |x| <= x_cap, forms Christoffel symbols and
    their derivatives by 4th-order finite differences (t direction) and
    the same stencils on the uniform x grid, and contracts to R. Returns
    (R_oracle, R_library, t_rows) restricted to interior t rows with
    t >= t_min. The path's time warp makes g(t) vary fastest just after
    t = 0; rows inside that layer need t_min > 0 (or a finer t grid) for
    the finite differences to be resolved.
    """
    path = collar.path
    t = collar.t_grid
    # uniform polar-angle grid; theta is better conditioned than x = cos
    # theta for finite differencing near |x| = x_cap
    theta_o = np.linspace(np.arccos(x_cap), np.arccos(-x_cap), n_x)
    xo = np.cos(theta_o)
    hx = theta_o[1] - theta_o[0]
    ht = t[1] - t[0]
    n_t = len(t)
    # the preserved area density rho = e^{2 phi_raw(0)} as a function of x
    c0 = spectral.to_legendre(path.phis_raw[0], path.x, path.w)
    rho = np.exp(2.0 * npleg.legval(xo, c0))

    # transported coordinate and conformal factor at the output grid
    X = _legendre_eval_rows(path.X, path.x, path.w, xo)
    v = _legendre_eval_rows(collar.v, path.x, path.w, xo)
    phi = np.empty_like(X)
    for i in range(n_t):
        phi[i] = npleg.legval(X[i], path._phi_series[i])
    E = collar.E_fn(t)[:, None]
    Xp = rho * np.exp(-2.0 * phi)
    G0 = v ** 2
    # dx = -sin(theta) dtheta converts the x-component to the theta chart
    G1 = E ** 2 * rho * Xp * (1.0 - xo ** 2) / (1.0 - X ** 2)
    G2 = E ** 2 * np.exp(2.0 * phi) * (1.0 - X ** 2)

    G = np.stack([G0, G1, G2])
    dG = np.zeros((2, 3) + G0.shape)
    for a, h in enumerate([ht, hx]):
        for i in range(3):
            dG[a, i] = spectral.deriv_uniform(G[i], h, axis=a)

    Ginv = 1.0 / G
    # Gamma^k_{ij}, diagonal metric: only i, j, k in {0, 1} derivatives act
    Gamma = np.zeros((3, 3, 3) + G0.shape)
    for k in range(3):
        for i in range(3):
            for j in range(3):
                term = 0.0
                if j == k and i < 2:
                    term = term + dG[i, k]
                if i == k and j < 2:
                    term = term + dG[j, k]
                if i == j and k < 2:
                    term = term - dG[k, i]
                Gamma[k, i, j] = 0.5 * Ginv[k] * term

    dGamma = np.zeros((2, 3, 3, 3) + G0.shape)
    for a, h in enumerate([ht, hx]):
        for k in range(3):
            for i in range(3):
                for j in range(3):
                    dGamma[a, k, i, j] = spectral.deriv_uniform(
                        Gamma[k, i, j], h, axis=a)

    ricci = np.zeros((3, 3) + G0.shape)
    for i in range(3):
        for j in range(3):
            term = 0.0
            for k in range(2):
                term = term + dGamma[k, k, i, j]
            if j < 2:
                for k in range(3):
                    term = term - dGamma[j, k, i, k]
            for k in range(3):
                for l in range(3):
                    term = term + (Gamma[k, k, l] * Gamma[l, i, j]
                                   - Gamma[k, j, l] * Gamma[l, i, k])
            ricci[i, j] = term

    R = sum(Ginv[i] * ricci[i, i] for i in range(3))

    from ahext.geometry import collar_scalar_curvature
    R_lib_nodes = collar_scalar_curvature(collar)
    R_lib = _legendre_eval_rows(R_lib_nodes, path.x, path.w, xo)
    keep = np.zeros(n_t, dtype=bool)
    keep[3:n_t - 3] = True
    keep &= t >= t_min
    return R[keep], R_lib[keep], t[keep]
