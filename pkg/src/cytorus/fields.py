"""Biperiodic scalar fields on the unit 2-torus.

A :class:`TorusField` samples a function on the uniform grid
``(i/n1, j/n2)``, ``i < n1``, ``j < n2``, over one fundamental domain of
``R^2 / Z^2``.  Periodicity is structural: there is no duplicated seam row
or column, so the trapezoidal rule degenerates to the plain mean and is
spectrally accurate.

Two differentiation schemes are supported:

* ``"spectral"`` (default): Fourier differentiation, exact for trigonometric
  polynomials resolved by the grid.
* ``"fd4"``: 4th-order centred finite differences with periodic wrap,
  retained for cross-validation and convergence studies.

All operations are pure; fields are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .errors import ValidationError

SPECTRAL = "spectral"
FD4 = "fd4"
SCHEMES = (SPECTRAL, FD4)


def _freqs(n):
    """Integer frequencies along one axis (FFT order)."""
    return np.fft.fftfreq(n, d=1.0 / n)


def _spectral_diff(values, axis, order):
    n = values.shape[axis]
    k = _freqs(n)
    mult = (2j * np.pi * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        # the Nyquist mode has no well-defined odd derivative on a real grid
        mult[n // 2] = 0.0
    shape = [1, 1]
    shape[axis] = n
    vhat = _fft.fft(values, axis=axis)
    out = _fft.ifft(vhat * mult.reshape(shape), axis=axis)
    if np.isrealobj(values):
        return np.ascontiguousarray(out.real)
    return out


def _fd4_diff(values, axis, order):
    n = values.shape[axis]
    if n < 5:
        raise ValidationError("fd4 scheme needs at least 5 points per axis")
    h = 1.0 / n
    r = lambda s: np.roll(values, -s, axis=axis)  # r(s)[i] = f[i + s]
    if order == 1:
        return (-r(2) + 8.0 * r(1) - 8.0 * r(-1) + r(-2)) / (12.0 * h)
    return (-r(2) + 16.0 * r(1) - 30.0 * values + 16.0 * r(-1) - r(-2)) / (12.0 * h * h)


@dataclass(frozen=True)
class TorusField:
    """Biperiodic scalar sampled on an ``n1 x n2`` grid.

    Parameters
    ----------
    values : ndarray
        Samples ``f(i/n1, j/n2)``; real in all solver paths, complex values
        are allowed for assembled complex-form coefficients.
    scheme : str
        Differentiation scheme, ``"spectral"`` or ``"fd4"``.
    """

    values: np.ndarray
    scheme: str = SPECTRAL

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise ValidationError("TorusField values must be a 2-d array")
        if not np.all(np.isfinite(v)):
            raise ValidationError("TorusField values must be finite")
        if self.scheme not in SCHEMES:
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    # -- basic queries -------------------------------------------------

    @property
    def n1(self):
        return self.values.shape[0]

    @property
    def n2(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def mean(self):
        return self.values.mean()

    def max_abs(self):
        return float(np.abs(self.values).max())

    # -- construction ----------------------------------------------------

    @classmethod
    def from_function(cls, fn, n1, n2=None, scheme=SPECTRAL):
        """Sample ``fn(x, y)`` on the grid; fn must broadcast over arrays."""
        n2 = n1 if n2 is None else n2
        x = np.arange(n1) / n1
        y = np.arange(n2) / n2
        X, Y = np.meshgrid(x, y, indexing="ij")
        return cls(np.asarray(fn(X, Y), dtype=float), scheme)

    @classmethod
    def constant(cls, value, n1, n2=None, scheme=SPECTRAL):
        n2 = n1 if n2 is None else n2
        return cls(np.full((n1, n2), value, dtype=float), scheme)

    @classmethod
    def zeros(cls, n1, n2=None, scheme=SPECTRAL):
        return cls.constant(0.0, n1, n2, scheme)

    def grids(self):
        """Coordinate arrays (X, Y) with the field's shape."""
        x = np.arange(self.n1) / self.n1
        y = np.arange(self.n2) / self.n2
        return np.meshgrid(x, y, indexing="ij")

    # -- calculus --------------------------------------------------------

    def derivative(self, axis, order=1):
        """Partial derivative along ``axis`` (1 or 2) of ``order`` (1 or 2)."""
        if axis not in (1, 2):
            raise ValidationError("axis must be 1 or 2")
        if order not in (1, 2):
            raise ValidationError("order must be 1 or 2")
        diff = _spectral_diff if self.scheme == SPECTRAL else _fd4_diff
        return TorusField(diff(self.values, axis - 1, order), self.scheme)

    def dx(self, order=1):
        return self.derivative(1, order)

    def dy(self, order=1):
        return self.derivative(2, order)

    def integrate(self):
        """Integral over the unit fundamental domain (trapezoidal = mean)."""
        return self.values.mean()

    def transpose(self):
        return TorusField(self.values.T, self.scheme)

    def conj(self):
        return TorusField(self.values.conj(), self.scheme)

    def real(self):
        return TorusField(self.values.real, self.scheme)

    def imag(self):
        return TorusField(self.values.imag, self.scheme)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TorusField):
            if other.shape != self.shape:
                raise ValidationError("field grids do not match")
            if other.scheme != self.scheme:
                raise ValidationError("field schemes do not match")
            return other.values
        return other

    def __add__(self, other):
        return TorusField(self.values + self._coerce(other), self.scheme)

    __radd__ = __add__

    def __sub__(self, other):
        return TorusField(self.values - self._coerce(other), self.scheme)

    def __rsub__(self, other):
        return TorusField(self._coerce(other) - self.values, self.scheme)

    def __mul__(self, other):
        return TorusField(self.values * self._coerce(other), self.scheme)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return TorusField(self.values / self._coerce(other), self.scheme)

    def __rtruediv__(self, other):
        return TorusField(self._coerce(other) / self.values, self.scheme)

    def __neg__(self):
        return TorusField(-self.values, self.scheme)


def apply(fn, f: TorusField) -> TorusField:
    """Apply a numpy ufunc pointwise."""
    return TorusField(fn(f.values), f.scheme)


def exp(f):
    return apply(np.exp, f)


def log(f):
    return apply(np.log, f)


# -- module-level operations ------------------------------------------------


def derivative(f: TorusField, axis: int, order: int = 1) -> TorusField:
    return f.derivative(axis, order)


def integrate(f: TorusField) -> float:
    return f.integrate()


def laplacian(f: TorusField) -> TorusField:
    return f.derivative(1, 2) + f.derivative(2, 2)


def poisson_solve(q: TorusField, tol_mean: float = 1e-8) -> TorusField:
    """Invert the flat Laplacian on the torus.

    Returns the mean-zero ``phi`` with ``Lap(phi) = q - mean(q)``, by division
    in Fourier space.  Rejects inputs whose mean exceeds ``tol_mean`` since the
    constant mode is not invertible.
    """
    m = q.mean()
    if abs(m) > tol_mean:
        raise ValidationError(
            f"poisson_solve needs a (near) mean-zero source, got mean {m:.3e}"
        )
    k1 = _freqs(q.n1)
    k2 = _freqs(q.n2)
    sym = -4.0 * np.pi**2 * (k1[:, None] ** 2 + k2[None, :] ** 2)
    qhat = _fft.fft2(q.values - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        phat = qhat / sym
    phat[0, 0] = 0.0
    out = _fft.ifft2(phat)
    if np.isrealobj(q.values):
        out = out.real
    return TorusField(out, q.scheme)


def normalize_rhs(F: TorusField, target: float) -> TorusField:
    """Shift ``F`` by the constant making ``int exp(F) = target``.

    Closed form: ``F + log(target / mean(exp(F)))``; requires ``target > 0``.
    """
    if not target > 0:
        raise ValidationError("normalization target must be positive")
    return F + float(np.log(target / np.exp(F.values).mean()))


def normalization_shift(F: TorusField, target: float) -> float:
    """The constant added by :func:`normalize_rhs`."""
    if not target > 0:
        raise ValidationError("normalization target must be positive")
    return float(np.log(target / np.exp(F.values).mean()))


def random_smooth(n1, n2=None, kmax=6, amplitude=1.0, seed=0, scheme=SPECTRAL,
                  zero_mean=True):
    """Band-limited random field (modes up to ``kmax``), for property tests."""
    n2 = n1 if n2 is None else n2
    rng = np.random.default_rng(seed)
    spec = np.zeros((n1, n2), dtype=complex)
    for a in range(-kmax, kmax + 1):
        for b in range(-kmax, kmax + 1):
            if a == 0 and b == 0:
                continue
            c = rng.normal() + 1j * rng.normal()
            spec[a % n1, b % n2] += c
            spec[(-a) % n1, (-b) % n2] += np.conj(c)
    vals = _fft.ifft2(spec).real
    scale = np.abs(vals).max()
    if scale > 0:
        vals *= amplitude / scale
    if not zero_mean:
        vals += amplitude * rng.normal()
    return TorusField(vals, scheme)
