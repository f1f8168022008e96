"""Spectral helpers on equispaced periodic grids.

All routines assume samples f_j = f(2*pi*j/N), N even, and use the
symmetric trigonometric interpolant (Nyquist bin treated as a cosine).
"""

import numpy as np

from .errors import GridMismatch, NoConvergence


def grid(n):
    """Equispaced angles 2*pi*j/n, j = 0..n-1."""
    return 2.0 * np.pi * np.arange(n) / n


def _check_even(samples):
    n = len(samples)
    if n < 4 or n % 2:
        raise GridMismatch(f"need an even number of samples >= 4, got {n}")
    return n


def coefficients(samples):
    """Raw DFT coefficients fft(f)/N in numpy bin order."""
    return np.fft.fft(samples) / len(samples)


def conjugate_multiplier(n):
    """Fourier multiplier of the circle conjugation: e^{ikt} -> -i sgn(k) e^{ikt}."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    m = -1j * np.sign(k)
    m[0] = 0.0
    m[n // 2] = 0.0  # Nyquist mode has no conjugate on the grid
    return m


def conjugate_samples(samples):
    """Conjugate function on the circle; zero mean, kills constants.

    For complex input acts componentwise: H[u + iv] = H[u] + i H[v].
    """
    samples = np.asarray(samples)
    n = _check_even(samples)
    hat = np.fft.fft(samples) * conjugate_multiplier(n)
    out = np.fft.ifft(hat)
    return out.real if np.isrealobj(samples) else out


def derivative(samples, order=1):
    """Spectral d^order/dt^order; odd orders zero the Nyquist bin."""
    samples = np.asarray(samples)
    n = _check_even(samples)
    k = np.fft.fftfreq(n, d=1.0 / n)
    mult = (1j * k) ** order
    if order % 2:
        mult[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(samples) * mult)
    return out.real if np.isrealobj(samples) else out


def eval_interpolant(samples, t):
    """Evaluate the trigonometric interpolant of the samples at angles t."""
    samples = np.asarray(samples)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = _check_even(samples)
    c = np.fft.fft(samples) / n
    half = n // 2
    # modes 1 .. half-1 and their negatives, constant, plus Nyquist cosine
    out = np.full(t.shape, c[0], dtype=complex)
    for k in range(1, half):
        out += c[k] * np.exp(1j * k * t) + c[n - k] * np.exp(-1j * k * t)
    out += c[half] * np.cos(half * t)
    return out.real if np.isrealobj(samples) else out


def upsample(samples, factor):
    """Zero-padded resampling onto a factor-times finer grid."""
    samples = np.asarray(samples)
    n = _check_even(samples)
    if factor <= 1:
        return samples.copy()
    m = n * int(factor)
    c = np.fft.fft(samples)
    out_hat = np.zeros(m, dtype=complex)
    half = n // 2
    out_hat[:half] = c[:half]
    out_hat[-half + 1:] = c[half + 1:]
    out_hat[half] = 0.5 * c[half]      # split the Nyquist cosine symmetrically
    out_hat[m - half] = 0.5 * c[half]
    out = np.fft.ifft(out_hat) * (m / n)
    return out.real if np.isrealobj(samples) else out


def sup_norm(samples, factor=8):
    """Sup norm estimated on an upsampled grid (grid-size independent)."""
    return float(np.max(np.abs(upsample(samples, factor))))


def negative_energy_fraction(samples):
    """Fraction of l2 energy carried by strictly negative frequencies."""
    samples = np.asarray(samples, dtype=complex)
    n = _check_even(samples)
    c = np.fft.fft(samples) / n
    total = float(np.sum(np.abs(c) ** 2))
    if total == 0.0:
        return 0.0
    neg = float(np.sum(np.abs(c[n // 2 + 1:]) ** 2))
    return np.sqrt(neg / total)


def top_band_energy_fraction(samples):
    """Fraction of l2 energy in the top quarter of the spectrum (|k| > 3N/8)."""
    samples = np.asarray(samples, dtype=complex)
    n = _check_even(samples)
    c = np.fft.fft(samples) / n
    total = float(np.sum(np.abs(c) ** 2))
    if total == 0.0:
        return 0.0
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    top = float(np.sum(np.abs(c[k > 3 * n / 8]) ** 2))
    return np.sqrt(top / total)


def taylor_from_boundary(samples, n_coeffs):
    """Taylor coefficients of the holomorphic extension from circle boundary values.

    Anti-holomorphic content is simply dropped (it aliases into high bins).
    """
    samples = np.asarray(samples, dtype=complex)
    n = _check_even(samples)
    c = np.fft.fft(samples) / n
    n_coeffs = min(n_coeffs, n // 2)
    return c[:n_coeffs].copy()


def eval_taylor(coeffs, zeta):
    """Horner evaluation of a Taylor polynomial at (arrays of) points."""
    zeta = np.asarray(zeta, dtype=complex)
    out = np.zeros_like(zeta)
    for c in coeffs[::-1]:
        out = out * zeta + c
    return out


def cauchy_integral(boundary_values, z_samples, z_tangent, targets):
    """Trapezoid discretization of the Cauchy integral over a closed curve.

    boundary_values, z_samples, z_tangent are sampled at the same equispaced
    parameter grid; z_tangent = dz/dt. Spectrally accurate for targets well
    inside the curve.
    """
    g = np.asarray(boundary_values, dtype=complex)
    z = np.asarray(z_samples, dtype=complex)
    zt = np.asarray(z_tangent, dtype=complex)
    n = len(g)
    targets = np.atleast_1d(np.asarray(targets, dtype=complex))
    # (targets, nodes) kernel; fine at the sizes used here
    denom = z[None, :] - targets[:, None]
    vals = (g * zt)[None, :] / denom
    return vals.sum(axis=1) / (1j * n)


def invert_correspondence(theta_samples, theta_targets, tol=1e-13, max_iter=60):
    """Solve theta(t) = target for t, for a monotone correspondence.

    theta_samples are values of theta at the equispaced t grid with
    theta(t) = t + periodic part.
    """
    theta_samples = np.asarray(theta_samples, dtype=float)
    n = len(theta_samples)
    psi = theta_samples - grid(n)          # periodic part
    targets = np.atleast_1d(np.asarray(theta_targets, dtype=float))
    t = targets.copy()
    dpsi = derivative(psi)
    for _ in range(max_iter):
        f = t + eval_interpolant(psi, t) - targets
        if np.max(np.abs(f)) < tol:
            return t
        slope = 1.0 + eval_interpolant(dpsi, t)
        t = t - f / slope
    raise NoConvergence("correspondence inversion did not converge")
