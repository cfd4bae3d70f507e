"""Complex-analytic and linear-algebra substrate.

Theta functions with characteristics use the Mumford normalization

    theta[a, b](tau, z) = sum_n exp(pi i tau (n + a)^2 + 2 pi i (n + a)(z + b)).
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

ZERO_TOL = 1e-10
"""Singular values below ZERO_TOL * max(1, max|A|) count as zero.

The floor at 1 keeps pure rounding noise (an operator that should vanish) rank zero."""

CONDITION_LIMIT = 1e12

# exp(-x) < 1e-17 for x above this
_TAIL_EXPONENT = 40.0


class DomainError(ValueError):
    pass


class ResolutionError(RuntimeError):
    pass


class ConditioningError(RuntimeError):
    pass


@dataclass(frozen=True)
class UpperHalfParam:
    """tau = B + iA with A > 0."""

    B: float
    A: float

    def __post_init__(self):
        if not self.A > 0:
            raise DomainError(f"tau must lie in the upper half plane, got A={self.A}")

    @property
    def tau(self) -> complex:
        return complex(self.B, self.A)

    @classmethod
    def from_complex(cls, tau) -> "UpperHalfParam":
        tau = complex(tau)
        return cls(tau.real, tau.imag)

    @classmethod
    def parse(cls, text: str) -> "UpperHalfParam":
        """Parse strings such as ``0.2+0.9i`` or ``0.5i``."""
        s = text.strip().replace(" ", "").replace("i", "j")
        return cls.from_complex(complex(s))

    def scaled(self, r: int) -> "UpperHalfParam":
        return UpperHalfParam(self.B * r, self.A * r)

    def __str__(self):
        return f"{self.B:g}{self.A:+g}i"


def as_tau(tau) -> complex:
    if isinstance(tau, UpperHalfParam):
        return tau.tau
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError(f"tau must lie in the upper half plane, got {tau}")
    return tau


def default_cutoff(tau, z=0j, a=0.0) -> int:
    """Number of terms on each side of the dominant index.

    Terms decay like exp(-pi A m^2) away from the peak at
    n = -a - Im z / A, so m >= sqrt(40 / (pi A)) pushes the tail below 1e-17.
    """
    t = as_tau(tau)
    A = t.imag
    zi = np.max(np.abs(np.imag(np.asarray(z, dtype=complex)))) if np.size(z) else 0.0
    return int(math.ceil(abs(float(a)) + zi / A + math.sqrt(_TAIL_EXPONENT / (math.pi * A)))) + 2


_WINDOW = {"scale": 1, "fixed": None}


@contextlib.contextmanager
def summation_window(scale: int = 1, fixed: int | None = None):
    """Temporarily widen every adaptive lattice window by ``scale``, or pin it to ``fixed`` terms.

    Used to test that truncated theta and triangle sums are converged.
    """
    old = dict(_WINDOW)
    _WINDOW.update(scale=scale, fixed=fixed)
    try:
        yield
    finally:
        _WINDOW.update(old)


def window_half_width(tau) -> int:
    """Half-width of the centred theta window for modulus tau."""
    if _WINDOW["fixed"] is not None:
        return int(_WINDOW["fixed"])
    t = as_tau(tau)
    return _WINDOW["scale"] * (int(math.ceil(math.sqrt(_TAIL_EXPONENT / (math.pi * t.imag)))) + 3)


def _index_window(tau, z, a, cutoff):
    """Summation indices, centred on the dominant term for every z."""
    t = as_tau(tau)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if cutoff is None:
        half = window_half_width(t)
        centre = np.rint(-float(a) - z.imag / t.imag).astype(int)
        return z, centre[:, None] + np.arange(-half, half + 1)[None, :]
    n = np.arange(-cutoff, cutoff + 1)
    return z, np.broadcast_to(n, (z.size, n.size))


def _theta_exponents(tau, z, a, b, cutoff):
    t = as_tau(tau)
    zz, n = _index_window(t, z, a, cutoff)
    m = n + float(a)
    return zz, m, 1j * np.pi * t * m**2 + 2j * np.pi * m * (zz[:, None] + float(b))


def theta_derivatives(tau, z, a=0.0, b=0.0, order: int = 0, cutoff: int | None = None, logshift=None):
    """Derivatives d^j/dz^j theta[a,b](tau, z) for j = 0..order.

    Returns an array of shape ``(order + 1,) + shape(z)``. With ``cutoff=None`` the
    window is re-centred on the dominant term of each z, so large |Im z| is safe.
    ``logshift`` (scalar or one value per z) multiplies the result by
    exp(logshift) inside the exponent, which avoids overflow of either factor.
    """
    shape = np.shape(z)
    zz, m, expo = _theta_exponents(tau, z, a, b, cutoff)
    if logshift is not None:
        expo = expo + np.broadcast_to(np.asarray(logshift, dtype=complex).reshape(-1), (zz.size,))[:, None]
    terms = np.exp(expo)
    out = np.empty((order + 1, zz.size), dtype=complex)
    fac = 2j * np.pi * m
    weight = np.ones_like(m, dtype=complex)
    for j in range(order + 1):
        out[j] = np.sum(weight * terms, axis=1)
        weight = weight * fac
    return out.reshape((order + 1,) + shape)


def theta_table(tau, z, chars, order: int):
    """Derivative tables of theta[a, 0](tau, z) for several characteristics a at once.

    Returns (peak, ders) with peak[k, i] the log of the largest term at z_i and
    ders[k, j, i] the j-th derivative divided by exp(peak[k, i]).
    """
    t = as_tau(tau)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = np.asarray([float(c) for c in chars])[:, None, None]
    half = window_half_width(t)
    centre = np.rint(-a - z.imag[None, :, None] / t.imag)
    m = centre + np.arange(-half, half + 1)[None, None, :] + a
    expo = 1j * np.pi * t * m**2 + 2j * np.pi * m * z[None, :, None]
    peak = np.max(expo.real, axis=2)
    terms = np.exp(expo - peak[:, :, None])
    fac = 2j * np.pi * m
    ders = np.empty((a.shape[0], order + 1, z.size), dtype=complex)
    for j in range(order + 1):
        ders[:, j] = np.sum(terms, axis=2)
        terms = terms * fac
    return peak, ders


def theta_log_peak(tau, z, a=0.0) -> np.ndarray:
    """log of the largest term modulus of theta[a, b](tau, z), per z (independent of b)."""
    zz, _, expo = _theta_exponents(tau, z, a, 0.0, None)
    return np.max(expo.real, axis=1)


def theta(tau, z, a=0.0, b=0.0, cutoff: int | None = None):
    """theta[a,b](tau, z); vectorized over z."""
    if isinstance(tau, UpperHalfParam) is False:
        as_tau(tau)
    val = theta_derivatives(tau, z, a, b, 0, cutoff)[0]
    return complex(val) if np.ndim(val) == 0 else val


def is_nilpotent(N, tol: float = 1e-12) -> bool:
    N = np.asarray(N, dtype=complex)
    d = N.shape[0]
    if d == 0:
        return True
    scale = max(1.0, float(np.max(np.abs(N))))
    P = np.linalg.matrix_power(N, d)
    return bool(np.max(np.abs(P)) <= tol * scale**d)


@dataclass(frozen=True, eq=False)
class NilpotentDatum:
    """A nilpotent endomorphism N of C^dim."""

    N: np.ndarray

    def __post_init__(self):
        N = np.array(self.N, dtype=complex)
        if N.ndim != 2 or N.shape[0] != N.shape[1]:
            raise DomainError("nilpotent datum must be square")
        if not np.all(np.isfinite(N)):
            raise DomainError("non-finite entries")
        if not is_nilpotent(N):
            raise DomainError("matrix is not nilpotent")
        N.setflags(write=False)
        object.__setattr__(self, "N", N)

    @classmethod
    def jordan(cls, dim: int) -> "NilpotentDatum":
        return cls(np.eye(dim, k=1))

    @classmethod
    def zero(cls, dim: int = 1) -> "NilpotentDatum":
        return cls(np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return self.N.shape[0]

    @property
    def cyclic(self) -> bool:
        if self.dim == 0:
            return False
        return matrix_rank(self.N) == self.dim - 1

    def __eq__(self, other):
        return isinstance(other, NilpotentDatum) and self.N.shape == other.N.shape and np.array_equal(self.N, other.N)

    def __hash__(self):
        return hash((self.dim, self.N.tobytes()))

    def __repr__(self):
        return f"NilpotentDatum(dim={self.dim})"


def nilpotent_poly_exp(X):
    """exp(X) for nilpotent X as the finite Taylor sum."""
    X = np.asarray(X, dtype=complex)
    d = X.shape[0]
    out = np.eye(d, dtype=complex)
    term = np.eye(d, dtype=complex)
    for j in range(1, d + 1):
        term = term @ X / j
        out = out + term
    return out


def nilpotent_exp(s, b, N) -> np.ndarray:
    """exp(s (-2 pi i b Id + N)) = exp(-2 pi i b s) sum_j (sN)^j / j!."""
    if isinstance(N, NilpotentDatum):
        N = N.N
    N = np.asarray(N, dtype=complex)
    return np.exp(-2j * np.pi * float(b) * s) * nilpotent_poly_exp(s * N)


def nilpotent_exp_many(s, b, N) -> np.ndarray:
    """nilpotent_exp for an array of s; shape (len(s), d, d)."""
    if isinstance(N, NilpotentDatum):
        N = N.N
    N = np.asarray(N, dtype=complex)
    s = np.asarray(s, dtype=float)
    d = N.shape[0]
    out = np.broadcast_to(np.eye(d, dtype=complex), (s.size, d, d)).copy()
    power, coef = np.eye(d, dtype=complex), np.ones(s.size)
    for j in range(1, d):
        power = power @ N
        coef = coef * s / j
        out += coef[:, None, None] * power
    return np.exp(-2j * np.pi * float(b) * s)[:, None, None] * out


def theta_nilpotent(tau, z, Ntilde, a=0.0, b=0.0, cutoff: int | None = None):
    """theta[a,b](tau, z Id + Ntilde) by the finite Taylor expansion in Ntilde."""
    Nt = np.asarray(Ntilde, dtype=complex)
    if not is_nilpotent(Nt):
        raise DomainError("matrix shift is not nilpotent")
    d = Nt.shape[0]
    ders = theta_derivatives(tau, z, a, b, max(d - 1, 0), cutoff)
    out = np.zeros((d, d), dtype=complex)
    power = np.eye(d, dtype=complex)
    for j in range(d):
        out += ders[j] / math.factorial(j) * power
        power = power @ Nt
    return out


def fourier_coefficients(f, sample_count: int = 64, height: float = 0.0, max_freq: int | None = None):
    """Fourier coefficients c_m of a 1-periodic f on the line Im z = height.

    Returns a dict m -> c_m for |m| <= max_freq, normalized so that
    f(z) = sum_m c_m exp(2 pi i m z). Trapezoid quadrature over one period.
    """
    if max_freq is None:
        max_freq = sample_count // 4
    if sample_count < 4 * max_freq:
        raise ResolutionError("sample_count must be at least 4 * max_freq")
    x = np.arange(sample_count) / sample_count
    z = x + 1j * height
    vals = np.asarray(f(z), dtype=complex)
    raw = np.fft.fft(vals, axis=0) / sample_count
    scale = max(np.max(np.abs(raw)), 1e-300)
    nyq = sample_count // 2
    band = np.abs(raw[nyq - 1: nyq + 2]) if sample_count > 4 else np.abs(raw)
    if np.max(band) > 1e-10 * max(scale, 1.0):
        raise ResolutionError("aliasing: spectrum not resolved at Nyquist band")
    out = {}
    for m in range(-max_freq, max_freq + 1):
        c = raw[m % sample_count] * np.exp(2 * np.pi * m * height)
        out[m] = c
    return out


def _svd(A):
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return None
    return np.linalg.svd(A)


def matrix_rank(A, tol: float = ZERO_TOL) -> int:
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(A))))
    return int(np.sum(s > tol * scale))


def kernel_basis(A, tol: float = ZERO_TOL) -> np.ndarray:
    """Orthonormal kernel basis as columns."""
    A = np.asarray(A, dtype=complex)
    rows, cols = A.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    scale = np.max(np.abs(A)) if A.size else 0.0
    if rows == 0 or scale == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(A)
    scale = max(1.0, scale)
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj().T.copy()


def cokernel_representatives(A, tol: float = ZERO_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of the image."""
    A = np.asarray(A, dtype=complex)
    rows, cols = A.shape
    if rows == 0:
        return np.zeros((0, 0), dtype=complex)
    scale = np.max(np.abs(A)) if A.size else 0.0
    if cols == 0 or scale == 0:
        return np.eye(rows, dtype=complex)
    u, s, _ = np.linalg.svd(A)
    scale = max(1.0, scale)
    rank = int(np.sum(s > tol * scale))
    return u[:, rank:].copy()


def solve_linear(A, rhs) -> np.ndarray:
    """Solve A x = rhs for square, well-conditioned A."""
    A = np.asarray(A, dtype=complex)
    if A.shape[0] != A.shape[1]:
        raise DomainError("solve_linear needs a square matrix")
    if A.shape[0] == 0:
        return np.zeros((0,) + np.shape(rhs)[1:], dtype=complex)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ConditioningError(f"condition estimate {cond:.3g} exceeds {CONDITION_LIMIT:g}")
    return np.linalg.solve(A, np.asarray(rhs, dtype=complex))


def lstsq(A, rhs):
    """Least-squares solve returning (x, relative residual)."""
    A = np.asarray(A, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    res = np.linalg.norm(A @ x - rhs) / max(np.linalg.norm(rhs), 1e-300)
    return x, res


def sylvester_operator(M2, M1) -> np.ndarray:
    """Matrix of f -> M2 f - f M1 on row-major vec(f), f: C^d1 -> C^d2."""
    M1 = np.asarray(M1, dtype=complex)
    M2 = np.asarray(M2, dtype=complex)
    d1, d2 = M1.shape[0], M2.shape[0]
    return np.kron(M2, np.eye(d1)) - np.kron(np.eye(d2), M1.T)


def left_mult(M, d1) -> np.ndarray:
    """Matrix of f -> M f on row-major vec(f)."""
    return np.kron(np.asarray(M, dtype=complex), np.eye(d1))


def right_mult(M, d2) -> np.ndarray:
    """Matrix of f -> f M on row-major vec(f)."""
    return np.kron(np.eye(d2), np.asarray(M, dtype=complex).T)


def taylor_coefficients(f, centre: complex, order: int, radius: float = 0.25, samples: int = 64):
    """Taylor coefficients c_0..c_order of an entire (matrix-valued) f at centre.

    Cauchy integral by the trapezoid rule on a circle.
    """
    k = np.arange(samples)
    w = np.exp(2j * np.pi * k / samples)
    vals = np.asarray(f(centre + radius * w), dtype=complex)
    coeffs = np.fft.fft(vals, axis=0) / samples
    out = []
    for j in range(order + 1):
        out.append(coeffs[j] / radius**j)
    return out


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**9)


def frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)
