"""Fourier substrate on the periodic torus [0, 2*pi)^N.

Coefficients are stored in FFT order and normalized so that the
coefficient at k=0 is the mean of the samples:

    u(x) = sum_k c_k exp(i k.x),    c_k = M^-N sum_x u(x) exp(-i k.x)

Wavenumber components lie in (-M/2, M/2]. The Nyquist plane (|k_j| = M/2)
carries no odd derivative: first-derivative symbols vanish there, so
``divergence(gradient(u))`` equals ``laplacian(u)`` on every field whose
Nyquist coefficients are zero (in particular on every dealiased field).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence, Union

import numpy as np


class SpectralError(ValueError):
    pass


class DimensionMismatch(SpectralError):
    pass


class GridMismatch(SpectralError):
    pass


class NonZeroMean(SpectralError):
    """Raised by inverse_laplacian when the input carries a mean; subtract it first."""


class EllipticityViolation(SpectralError):
    pass


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid with ``points`` samples per direction on [0, 2*pi)^dim."""

    dim: int
    points: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        m = self.points
        if m < 4 or m & (m - 1):
            raise ValueError(f"points must be a power of two >= 4, got {m}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def size(self) -> int:
        return self.points**self.dim

    @property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Integer wavenumber components as broadcastable open-mesh arrays."""
        return _open_mesh(self.dim, self.points, nyquist_zero=False)

    @property
    def derivative_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers used by first-derivative symbols (Nyquist set to 0)."""
        return _open_mesh(self.dim, self.points, nyquist_zero=True)

    @property
    def kmag2(self) -> np.ndarray:
        return _kmag2(self.dim, self.points)

    @property
    def kmag(self) -> np.ndarray:
        return _kmag(self.dim, self.points)

    @property
    def dealias_cutoff(self) -> int:
        """Largest retained |k_j| under the 2/3 rule (strictly below M/3)."""
        return math.ceil(self.points / 3) - 1

    @property
    def dealias_mask(self) -> np.ndarray:
        return _dealias_mask(self.dim, self.points)

    @property
    def max_wavenumber(self) -> float:
        """Largest resolved |k|: the corner of the wavenumber box."""
        return math.sqrt(self.dim) * self.points / 2

    def coordinates(self) -> tuple[np.ndarray, ...]:
        x = 2 * np.pi * np.arange(self.points) / self.points
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def _k1d(m: int, nyquist_zero: bool) -> np.ndarray:
    k = np.fft.fftfreq(m, 1.0 / m)
    k[m // 2] = 0.0 if nyquist_zero else m / 2
    return _readonly(k)


@lru_cache(maxsize=None)
def _open_mesh(dim: int, m: int, nyquist_zero: bool) -> tuple[np.ndarray, ...]:
    k = _k1d(m, nyquist_zero)
    out = []
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = m
        out.append(_readonly(k.reshape(shape).copy()))
    return tuple(out)


@lru_cache(maxsize=None)
def _kmag2(dim: int, m: int) -> np.ndarray:
    ks = _open_mesh(dim, m, False)
    total = np.zeros((m,) * dim)
    for k in ks:
        total = total + k * k
    return _readonly(total)


@lru_cache(maxsize=None)
def _kmag(dim: int, m: int) -> np.ndarray:
    return _readonly(np.sqrt(_kmag2(dim, m)))


@lru_cache(maxsize=None)
def _dealias_mask(dim: int, m: int) -> np.ndarray:
    kc = math.ceil(m / 3) - 1
    mask = np.ones((m,) * dim, dtype=bool)
    for k in _open_mesh(dim, m, False):
        mask = mask & (np.abs(k) <= kc)
    return _readonly(mask)


def reflect(a: np.ndarray, axes: Sequence[int] | None = None) -> np.ndarray:
    """Return b with b[k] = a[-k] in FFT ordering."""
    axes = tuple(range(a.ndim)) if axes is None else tuple(axes)
    return np.roll(np.flip(a, axes), 1, axes)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a scalar function on a TorusGrid."""

    grid: TorusGrid
    coeffs: np.ndarray
    is_real: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise DimensionMismatch(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        c = c.view()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def constant(cls, grid: TorusGrid, value: complex) -> "SpectralField":
        c = np.zeros(grid.shape, dtype=np.complex128)
        c[(0,) * grid.dim] = value
        return cls(grid, c, is_real=np.isreal(value))

    @property
    def mean(self) -> complex:
        return complex(self.coeffs[(0,) * self.grid.dim])

    def values(self) -> np.ndarray:
        return inverse_transform(self)

    def l2(self) -> float:
        """L^2 norm on the normalized torus, via Parseval."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def with_coeffs(self, coeffs: np.ndarray, is_real: bool | None = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs, self.is_real if is_real is None else is_real)

    def without_mean(self) -> "SpectralField":
        c = self.coeffs.copy()
        c[(0,) * self.grid.dim] = 0.0
        return self.with_coeffs(c)

    def _check(self, other: "SpectralField"):
        if not isinstance(other, SpectralField):
            return NotImplemented
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")
        return None

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, self.coeffs + other.coeffs, self.is_real and other.is_real)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, self.coeffs - other.coeffs, self.is_real and other.is_real)
        return NotImplemented

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs, self.is_real)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return SpectralField(self.grid, self.coeffs * scalar, self.is_real and np.isreal(scalar))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)


@dataclass(frozen=True, eq=False)
class VectorField:
    """N spectral components on one grid."""

    components: tuple[SpectralField, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DimensionMismatch("a vector field needs at least one component")
        g = comps[0].grid
        for c in comps[1:]:
            if c.grid != g:
                raise GridMismatch("all components must share one grid")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zeros(cls, grid: TorusGrid, n: int | None = None) -> "VectorField":
        n = grid.dim if n is None else n
        return cls(tuple(SpectralField.zeros(grid) for _ in range(n)))

    @classmethod
    def from_stack(cls, grid: TorusGrid, coeffs: np.ndarray, is_real: bool = True) -> "VectorField":
        return cls(tuple(SpectralField(grid, c, is_real) for c in coeffs))

    @property
    def grid(self) -> TorusGrid:
        return self.components[0].grid

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[SpectralField]:
        return iter(self.components)

    def __getitem__(self, i: int) -> SpectralField:
        return self.components[i]

    def stack(self) -> np.ndarray:
        return np.stack([c.coeffs for c in self.components])

    def values(self) -> np.ndarray:
        return np.stack([c.values() for c in self.components])

    def l2(self) -> float:
        return float(np.sqrt(sum(np.sum(np.abs(c.coeffs) ** 2) for c in self.components)))

    def _zip(self, other, op):
        if not isinstance(other, VectorField):
            return NotImplemented
        if len(other) != len(self):
            raise DimensionMismatch("vector fields of different length")
        return VectorField(tuple(op(a, b) for a, b in zip(self, other)))

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return VectorField(tuple(-c for c in self))

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.number)):
            return VectorField(tuple(c * scalar for c in self))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)


Field = Union[SpectralField, VectorField]
Symbol = Union[np.ndarray, Callable[..., np.ndarray], float]


def forward_transform(samples: np.ndarray, grid: TorusGrid) -> SpectralField:
    samples = np.asarray(samples)
    if samples.shape != grid.shape:
        raise DimensionMismatch(f"sample shape {samples.shape} does not match grid {grid.shape}")
    coeffs = np.fft.fftn(samples, norm="forward")
    return SpectralField(grid, coeffs, is_real=bool(np.isrealobj(samples)))


def inverse_transform(u: SpectralField) -> np.ndarray:
    x = np.fft.ifftn(u.coeffs, norm="forward")
    return x.real if u.is_real else x


def vector_from_samples(samples: Sequence[np.ndarray], grid: TorusGrid) -> VectorField:
    return VectorField(tuple(forward_transform(s, grid) for s in samples))


def hermitian_defect(u: SpectralField) -> float:
    """max |c(-k) - conj c(k)| relative to max |c|."""
    c = u.coeffs
    scale = np.max(np.abs(c))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(reflect(c) - np.conj(c))) / scale)


def _symbol_array(m: Symbol, grid: TorusGrid) -> np.ndarray:
    if callable(m):
        arr = m(grid.wavenumbers)
    else:
        arr = m
    return np.broadcast_to(np.asarray(arr), grid.shape)


def apply_multiplier(u: SpectralField, m: Symbol, hermitian: bool | None = None) -> SpectralField:
    """Multiply every coefficient by m(k).

    ``m`` is either an array on the wavenumber grid, a scalar, or a callable
    receiving the tuple of wavenumber components. The output is real when
    the input is real and the symbol is Hermitian (m(-k) = conj m(k)); pass
    ``hermitian`` to skip that check when it is known.
    """
    sym = _symbol_array(m, u.grid)
    if not np.all(np.isfinite(sym)):
        raise ValueError("multiplier is not finite at every resolved wavenumber")
    if hermitian is None:
        hermitian = bool(np.allclose(reflect(sym), np.conj(sym), rtol=0, atol=1e-14 * max(1.0, np.max(np.abs(sym)))))
    return SpectralField(u.grid, u.coeffs * sym, u.is_real and hermitian)


def derivative(u: SpectralField, axis: int) -> SpectralField:
    k = u.grid.derivative_wavenumbers[axis]
    return SpectralField(u.grid, 1j * k * u.coeffs, u.is_real)


def gradient(u: SpectralField) -> VectorField:
    return VectorField(tuple(derivative(u, a) for a in range(u.grid.dim)))


def divergence(w: VectorField) -> SpectralField:
    g = w.grid
    if len(w) != g.dim:
        raise DimensionMismatch(f"divergence needs {g.dim} components, got {len(w)}")
    ks = g.derivative_wavenumbers
    c = sum(1j * k * comp.coeffs for k, comp in zip(ks, w))
    return SpectralField(g, c, w.is_real)


def jacobian(w: VectorField) -> VectorField:
    """All first derivatives d_j w_i, flattened row-major (i outer)."""
    return VectorField(tuple(derivative(c, a) for c in w for a in range(w.grid.dim)))


def curl(w: VectorField) -> Field:
    """Scalar vorticity in 2D, vector curl in 3D."""
    g = w.grid
    if g.dim == 2:
        return derivative(w[1], 0) - derivative(w[0], 1)
    return VectorField(
        (
            derivative(w[2], 1) - derivative(w[1], 2),
            derivative(w[0], 2) - derivative(w[2], 0),
            derivative(w[1], 0) - derivative(w[0], 1),
        )
    )


def laplacian(u: SpectralField) -> SpectralField:
    return SpectralField(u.grid, -u.grid.kmag2 * u.coeffs, u.is_real)


def _inv_kmag2(grid: TorusGrid) -> np.ndarray:
    return _inv_kmag2_cached(grid.dim, grid.points)


@lru_cache(maxsize=None)
def _inv_kmag2_cached(dim: int, m: int) -> np.ndarray:
    k2 = _kmag2(dim, m)
    out = np.zeros_like(k2)
    nz = k2 > 0
    out[nz] = 1.0 / k2[nz]
    return _readonly(out)


def inverse_laplacian(u: SpectralField) -> SpectralField:
    """Per-mode division by -|k|^2; the input must be mean-free."""
    if abs(u.mean) > 1e-12 * max(u.l2(), 1e-300):
        raise NonZeroMean(f"field has mean {u.mean!r}; subtract it before inverting the Laplacian")
    return SpectralField(u.grid, -_inv_kmag2(u.grid) * u.coeffs, u.is_real)


def grad_inverse_laplacian(u: SpectralField) -> VectorField:
    """grad(Delta^-1) applied to the mean-free part of u."""
    return gradient(inverse_laplacian(u.without_mean()))


def _check_lame(mu: float, lam: float):
    if not (mu > 0 and lam + 2 * mu > 0):
        raise EllipticityViolation(f"need mu > 0 and lambda + 2 mu > 0, got mu={mu}, lambda={lam}")


def lame_operator(w: VectorField, mu: float, lam: float) -> VectorField:
    """A w = mu Laplacian(w) + (lambda + mu) grad div w, per mode."""
    _check_lame(mu, lam)
    g = w.grid
    d = divergence(w)
    ks = g.derivative_wavenumbers
    out = []
    for k, comp in zip(ks, w):
        out.append(SpectralField(g, -mu * g.kmag2 * comp.coeffs + (lam + mu) * 1j * k * d.coeffs, comp.is_real))
    return VectorField(tuple(out))


def lame_inverse(w: VectorField, mu: float, lam: float) -> VectorField:
    """Solve A z = w per mode; the k=0 mode of z is set to zero."""
    _check_lame(mu, lam)
    g = w.grid
    ks = g.derivative_wavenumbers
    kd2 = sum(k * k for k in ks)
    k2 = g.kmag2
    inv_t = _safe_inverse(-mu * k2)
    # longitudinal eigenvalue of A on the derivative wavenumber direction
    inv_l = _safe_inverse(-mu * k2 - (lam + mu) * kd2)
    kdotw = sum(k * c.coeffs for k, c in zip(ks, w))
    proj = _safe_inverse(kd2) * kdotw
    out = []
    for k, comp in zip(ks, w):
        longi = k * proj
        out.append(SpectralField(g, inv_t * (comp.coeffs - longi) + inv_l * longi, comp.is_real))
    return VectorField(tuple(out))


def _safe_inverse(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a, dtype=float)
    nz = a != 0
    out[nz] = 1.0 / a[nz]
    return out


def lp_norm(u: Field, p: float) -> float:
    """Grid L^p norm on the normalized torus (||1||_p = 1); p = inf gives the max."""
    if not (p >= 1):
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    if isinstance(u, VectorField):
        vals = u.values()
        mag = np.sqrt(np.sum(np.abs(vals) ** 2, axis=0))
    else:
        mag = np.abs(u.values())
    return lp_of_samples(mag, p)


def lp_of_samples(mag: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(mag))
    if p == 2:
        return float(np.sqrt(np.mean(mag * mag)))
    return float(np.mean(mag**p) ** (1.0 / p))


def dealias(u: SpectralField) -> SpectralField:
    """Zero every mode outside the 2/3-rule band."""
    return SpectralField(u.grid, np.where(u.grid.dealias_mask, u.coeffs, 0.0), u.is_real)


def truncate_samples(samples: np.ndarray, grid: TorusGrid) -> SpectralField:
    """Transform grid samples and keep only the 2/3-rule band."""
    return dealias(forward_transform(samples, grid))


def product(u: SpectralField, v: SpectralField) -> SpectralField:
    """Dealiased pointwise product: inputs and output truncated to the 2/3 band."""
    if u.grid != v.grid:
        raise GridMismatch(f"{u.grid} vs {v.grid}")
    a = inverse_transform(dealias(u))
    b = inverse_transform(dealias(v))
    return truncate_samples(a * b, u.grid)


def dot(w: VectorField, z: VectorField) -> SpectralField:
    """Dealiased pointwise inner product sum_j w_j z_j."""
    if len(w) != len(z):
        raise DimensionMismatch("dot of vector fields with different lengths")
    g = w.grid
    acc = 0
    for a, b in zip(w, z):
        acc = acc + inverse_transform(dealias(a)) * inverse_transform(dealias(b))
    return truncate_samples(acc, g)


def advect(v: VectorField, a: SpectralField) -> SpectralField:
    """Dealiased v . grad a."""
    return dot(v, gradient(a))


def advect_vector(v: VectorField, w: VectorField) -> VectorField:
    """Dealiased (v . grad) w, componentwise."""
    return VectorField(tuple(advect(v, c) for c in w))


def resample(u: SpectralField, grid: TorusGrid) -> SpectralField:
    """Copy coefficients onto another grid of the same dimension.

    Modes representable on both grids are copied; the rest are dropped
    (coarsening) or zero (refining). Nyquist modes are dropped in both
    directions so that real fields stay real.
    """
    if grid.dim != u.grid.dim:
        raise DimensionMismatch("resample needs grids of equal dimension")
    src = u.grid.points
    kmax = min(src, grid.points) // 2 - 1
    out = np.zeros(grid.shape, dtype=np.complex128)
    idx_src = np.r_[0 : kmax + 1, src - kmax : src]
    idx_dst = np.r_[0 : kmax + 1, grid.points - kmax : grid.points]
    out[np.ix_(*([idx_dst] * grid.dim))] = u.coeffs[np.ix_(*([idx_src] * grid.dim))]
    return SpectralField(grid, out, u.is_real)


def dilate(u: SpectralField, factor: int) -> SpectralField:
    """Coefficients of x -> u(factor * x): mode k moves to factor * k.

    Coefficients below 1e-14 of the largest are treated as round-off and
    dropped; raises if any remaining mode would leave the resolved box.
    """
    g = u.grid
    if factor < 1:
        raise ValueError("factor must be a positive integer")
    mag = np.abs(u.coeffs)
    nz = np.nonzero(mag > 1e-14 * mag.max()) if mag.max() > 0 else np.nonzero(mag)
    ks = [np.asarray(k).ravel()[i].astype(int) * factor for k, i in zip(g.wavenumbers, nz)]
    if any(np.any(np.abs(k) >= g.points // 2) for k in ks):
        raise ValueError("dilation pushes a mode beyond the resolved band")
    out = np.zeros(g.shape, dtype=np.complex128)
    out[tuple(k % g.points for k in ks)] = u.coeffs[nz]
    return SpectralField(g, out, u.is_real)
