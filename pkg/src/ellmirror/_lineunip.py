"""Line bundle times unipotent bundle on a single curve E_T, and Hom spaces between them.

A ``LineUnip`` on modulus T has factor of automorphy (for w -> w + T)

    e(w) = exp(-n pi i T - 2 pi i n w - 2 pi i x) exp(N),   x = alpha T + beta,

with (alpha, beta) exact rationals. Hom(P1, P2) with D = n2 - n1 > 0 has the
basis of matrix-shifted theta functions

    F[c, y](w) = theta[c, 0](D T, D (w + y) - Nh / (2 pi i)),   c = k / D,

acting on Hom(V1, V2) with Nh(f) = N2 f - f N1 and y = (x2 - x1) / D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numerics as nm


@dataclass(frozen=True, eq=False)
class LineUnip:
    T: complex
    n: int
    alpha: Fraction
    beta: Fraction
    N: np.ndarray

    @property
    def dim(self) -> int:
        return self.N.shape[0]

    @property
    def x(self) -> complex:
        return float(self.alpha) * self.T + float(self.beta)

    def automorphy(self, w):
        w = np.asarray(w, dtype=complex)
        scal = np.exp(-self.n * np.pi * 1j * self.T - 2j * np.pi * self.n * w - 2j * np.pi * self.x)
        return scal[..., None, None] * nm.nilpotent_poly_exp(self.N)


class HomLU:
    """Hom(P1, P2) for two LineUnip bundles on the same modulus."""

    def __init__(self, P1: LineUnip, P2: LineUnip):
        self.P1, self.P2 = P1, P2
        self.T = P1.T
        self.d1, self.d2 = P1.dim, P2.dim
        self.block = self.d1 * self.d2
        self.D = P2.n - P1.n
        self.Nh = nm.sylvester_operator(P2.N, P1.N)
        da = P2.alpha - P1.alpha
        db = P2.beta - P1.beta
        self.q = None
        self.kernel = None
        if self.D > 0:
            self.ya = da / self.D
            self.yb = db / self.D
            self.count = self.D
            self.dim = self.D * self.block
        elif self.D == 0 and da.denominator == 1 and db.denominator == 1:
            self.q = int(da)
            self.kernel = nm.kernel_basis(self.Nh)
            self.count = 1
            self.dim = self.kernel.shape[1]
        else:
            self.count = 0
            self.dim = 0

    @property
    def y(self) -> complex:
        return float(self.ya) * self.T + float(self.yb)

    # coefficients: a Coef with one row per theta index (D > 0) or a single
    # row holding the flat section in Hom(V1, V2) (D == 0)

    @property
    def rows(self) -> int:
        return self.D if self.D > 0 else 1

    # a batch of coefficient sets shares the row logs: mant has shape
    # (rows,) + batch + (block,) and vectors have shape batch + (dim,)

    def zero(self, batch=()) -> "Coef":
        return Coef(np.zeros((self.rows,) + tuple(batch) + (self.block,), dtype=complex),
                    np.zeros(self.rows, dtype=complex))

    def wrap(self, values) -> "Coef":
        """Coef from plain coefficient rows (shape (D, block), or (block,) when D == 0)."""
        values = np.asarray(values, dtype=complex).reshape(self.rows, self.block)
        return Coef.normalized(values, np.zeros(self.rows, dtype=complex))

    def from_vector(self, vec) -> "Coef":
        vec = np.asarray(vec, dtype=complex)
        batch = vec.shape[:-1]
        if self.D > 0:
            rows = np.moveaxis(vec.reshape(batch + (self.D, self.block)), -2, 0)
        elif self.dim == 0:
            return self.zero(batch)
        else:
            rows = (vec @ self.kernel.T)[None]
        return Coef.normalized(rows, np.zeros(self.rows, dtype=complex))

    def to_vector(self, coef: "Coef"):
        vals = coef.values()
        batch = vals.shape[1:-1]
        if self.D > 0:
            return np.moveaxis(vals, 0, -2).reshape(batch + (self.dim,))
        if self.dim == 0:
            return np.zeros(batch + (0,), dtype=complex)
        return vals[0] @ self.kernel.conj()

    def _powers(self, count):
        op = -self.Nh / (2j * np.pi)
        powers = [np.eye(self.block, dtype=complex)]
        for j in range(1, count):
            powers.append(powers[-1] @ op / j)
        return powers

    def evaluate(self, coef: "Coef", w):
        """Values at points w as (vals, logs): value = exp(logs)[:, None, None] * vals.

        vals has shape (len(w), d2, d1); logs is real and -inf where the value is zero.
        """
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        batch = coef.mant.shape[1:-1]
        shape = (w.size,) + batch + (self.d2, self.d1)
        out = np.zeros((w.size,) + batch + (self.block,), dtype=complex)
        ref = np.full(w.size, -np.inf)
        live = coef.live()
        if self.dim == 0 or not live:
            return out.reshape(shape), ref
        if self.D == 0:
            expo = -2j * np.pi * self.q * w + coef.logs[0]
            phase = np.exp(1j * expo.imag).reshape((w.size,) + (1,) * (len(batch) + 1))
            return (phase * coef.mant[0][None]).reshape(shape), expo.real
        order = self.d1 + self.d2 - 1
        powers = self._powers(order)
        DT = self.D * self.T
        arg = self.D * (w + self.y)
        peak, ders = _theta_table(DT, arg, self.D, order - 1)
        live = np.array(live)
        ref = np.max(peak[live] + coef.logs[live].real[:, None], axis=0)
        scale = np.exp(coef.logs[live][:, None] + peak[live] - ref[None, :])
        A = (ders[live] * scale[:, None, :]).reshape(-1, w.size).T
        vecs = np.stack([coef.mant[live] @ P.T for P in powers], axis=1)
        out += (A @ vecs.reshape(A.shape[1], -1)).reshape(out.shape)
        return out.reshape(shape), ref

    def jets(self, coef: "Coef", w0: complex, order: int):
        """Taylor coefficients g_k = F^{(k)}(w0) / k!, k <= order, as (array (order+1, d2, d1), log scale)."""
        out = np.zeros((order + 1, self.block), dtype=complex)
        live = coef.live()
        if self.dim == 0 or not live:
            return out.reshape(order + 1, self.d2, self.d1), -np.inf
        if self.D == 0:
            expo = -2j * np.pi * self.q * w0 + coef.logs[0]
            base = np.exp(1j * expo.imag) * coef.mant[0]
            for k in range(order + 1):
                out[k] = (-2j * np.pi * self.q) ** k / math.factorial(k) * base
            return out.reshape(order + 1, self.d2, self.d1), float(expo.real)
        npow = self.d1 + self.d2 - 1
        powers = self._powers(npow)
        DT = self.D * self.T
        arg = self.D * (w0 + self.y)
        ref = max(float(nm.theta_log_peak(DT, arg, Fraction(k, self.D))[0]) + coef.logs[k].real for k in live)
        for k in live:
            ders = nm.theta_derivatives(DT, arg, Fraction(k, self.D), 0.0, npow - 1 + order,
                                        logshift=coef.logs[k] - ref)
            vecs = np.stack([P @ coef.mant[k] for P in powers])
            for m in range(order + 1):
                scale = self.D**m / math.factorial(m)
                out[m] += scale * (ders[m: m + npow] @ vecs)
        return out.reshape(order + 1, self.d2, self.d1), ref

    def basis_element(self, index: int) -> "Coef":
        vec = np.zeros(self.dim, dtype=complex)
        vec[index] = 1.0
        return self.from_vector(vec)

    def expand(self, func, sample_hint: int = 0) -> "Coef":
        """Coefficients of a function lying in this space (Fourier matching).

        ``func`` maps an array of points to (vals, logs) in the format of ``evaluate``.
        """
        if self.dim == 0:
            return self.zero()
        if self.D == 0:
            vals, logs = func(np.array([0.1 + 0.0j, 0.37 + 0.0j]))
            val = np.asarray(vals[0], dtype=complex)
            val = val.reshape(val.shape[:-2] + (self.block,))
            if not np.isfinite(logs[0]):
                return self.zero(val.shape[:-1])
            proj = (val @ self.kernel.conj()) @ self.kernel.T
            return Coef.normalized(proj[None], np.array([logs[0] + 2j * np.pi * self.q * 0.1]))
        D, T = self.D, self.T
        A = T.imag
        mant = None
        logc = np.zeros(D, dtype=complex)
        width = math.sqrt(7.0 / (math.pi * D * A))
        spread = 2 * math.sqrt(_TAIL / (math.pi * D * A)) * D + 2 * width * D + 8
        samples = 1 << max(5, int(math.ceil(math.log2(4 * spread))))
        samples = max(samples, sample_hint)
        k = 0
        while k < D:
            group = [kk for kk in range(k, D) if (kk - k) / D <= width] or [k]
            cmid = (group[0] + group[-1]) / (2 * D)
            # mode mu = m + c dominates where Im(w + y) = -mu Im T
            h = -self.y.imag - cmid * A
            x = np.arange(samples) / samples
            vals, logs = func(x + 1j * h)
            vals = np.asarray(vals, dtype=complex)
            vals = vals.reshape(vals.shape[:-2] + (self.block,))
            if mant is None:
                mant = np.zeros((D,) + vals.shape[1:], dtype=complex)
            ref = np.max(logs)
            k = group[-1] + 1
            if not np.isfinite(ref):
                continue
            vals = vals * np.exp(np.asarray(logs) - ref).reshape((samples,) + (1,) * (vals.ndim - 1))
            raw = np.fft.fft(vals, axis=0) / samples
            for kk in group:
                mu = kk / D
                f = kk  # frequency D * mu
                logc[kk] = ref + 2 * np.pi * f * h - 1j * np.pi * D * T * mu**2 - 2j * np.pi * mu * D * self.y
                mant[kk] = raw[f % samples] @ nm.nilpotent_poly_exp(mu * self.Nh).T
        if mant is None:
            return self.zero()
        return Coef.normalized(mant, logc)

    # -- exact transforms between spaces ------------------------------------

    def transform(self, coef: "Coef", target: "HomLU", sigma: Fraction, p: int, logC: complex, op) -> "Coef":
        """Coefficients in ``target`` of  w -> exp(logC) * op(g(w + sigma T)) * exp(2 pi i p w)."""
        if self.dim == 0:
            return target.zero(coef.mant.shape[1:-1])
        if self.D == 0:
            qn = self.q - p
            if target.q != qn:
                raise AssertionError("transform lands outside the target space")
            vec = ((coef.mant[0] @ op.T) @ target.kernel.conj()) @ target.kernel.T
            shift = logC - 2j * np.pi * self.q * float(sigma) * self.T
            return Coef.normalized(vec[None], coef.logs + shift)
        D, T = self.D, self.T
        delta = Fraction(p, D)
        ya2 = self.ya + sigma - delta
        yb2 = self.yb
        if ya2 != target.ya or (yb2 - target.yb) * D != int((yb2 - target.yb) * D):
            raise AssertionError("transform lands outside the target space")
        u = int((yb2 - target.yb) * D)
        y2 = float(ya2) * T + float(yb2)
        K = -1j * np.pi * D * T * float(delta) ** 2 - 2j * np.pi * float(delta) * D * y2
        shift_op = nm.nilpotent_poly_exp(float(delta) * self.Nh)
        mant = np.zeros(coef.mant.shape, dtype=complex)
        logs = np.zeros(D, dtype=complex)
        M = (op @ shift_op).T
        for k in coef.live():
            c_new = Fraction(k, D) + delta
            kk = (k + p) % D
            mant[kk] = coef.mant[k] @ M
            logs[kk] = logC + K + 2j * np.pi * float(c_new % 1) * u + coef.logs[k]
        return Coef.normalized(mant, logs)


@dataclass
class Coef:
    """Coefficient rows stored as mant[k] * exp(logs[k]) with max |mant[k]| = 1.

    Theta coefficients on moduli with large imaginary part leave the double
    range long before the functions they describe do, so the size is kept in
    the exponent.
    """

    mant: np.ndarray
    logs: np.ndarray

    @classmethod
    def normalized(cls, mant, logs) -> "Coef":
        mant = np.array(mant, dtype=complex)
        logs = np.array(logs, dtype=complex)
        for k in range(mant.shape[0]):
            size = np.max(np.abs(mant[k])) if mant[k].size else 0.0
            if size == 0 or not np.isfinite(logs[k].real):
                mant[k] = 0
                logs[k] = 0
            else:
                mant[k] /= size
                logs[k] += math.log(size)
        return cls(mant, logs)

    def live(self) -> list:
        return [k for k in range(self.mant.shape[0]) if np.any(self.mant[k])]

    def shifted(self, log) -> "Coef":
        """The coefficients multiplied by exp(log)."""
        return Coef(self.mant, self.logs + log)

    def values(self) -> np.ndarray:
        return self.mant * np.exp(self.logs).reshape((-1,) + (1,) * (self.mant.ndim - 1))


def combine(parts):
    """Sum of (vals, logs) pairs in the ``evaluate`` format, on a common scale."""
    parts = list(parts)
    ref = np.max(np.stack([lg for _, lg in parts]), axis=0)
    safe = np.where(np.isfinite(ref), ref, 0.0)
    acc = 0
    for vals, lg in parts:
        fac = np.exp(np.where(np.isfinite(lg), lg - safe, -np.inf))
        acc = acc + fac.reshape(fac.shape + (1,) * (vals.ndim - fac.ndim)) * vals
    return acc, ref


_TAIL = 40.0

# Normalised theta derivative tables. Composition evaluates the same kernel
# spaces at the same sample points for every basis vector, so these repeat.
_TABLES: dict = {}


def _theta_table(tau, z, D, order):
    """theta_table for all characteristics k / D, memoised."""
    key = (tau, z.tobytes(), D, order, nm._WINDOW["scale"], nm._WINDOW["fixed"])
    hit = _TABLES.get(key)
    if hit is None:
        if len(_TABLES) > 4000:
            _TABLES.clear()
        hit = nm.theta_table(tau, z, [Fraction(k, D) for k in range(D)], order)
        _TABLES[key] = hit
    return hit
