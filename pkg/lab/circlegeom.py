#!/usr/bin/env python3
"""Trigonometric polynomials and quadrature on the circle R/2piZ.

Circle functions are carried as finite Fourier series

    f(t) = a0 + sum_k (a_k cos kt + b_k sin kt),   k = 1..D,

so that projection, antidifferentiation and phase shifts are exact
coefficient operations. Sampled data enters through ``fourier_analyze``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Tuple

import numpy as np

from lab.errors import DomainError, SamplingError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
UNIT_TOL = 1e-12


def wrap_angle(t):
    """Canonical representative of an angle in [0, 2pi). Works on arrays."""
    wrapped = np.mod(t, TWO_PI)
    # np.mod can return exactly 2pi for tiny negative inputs
    wrapped = np.where(wrapped >= TWO_PI, 0.0, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class Angle:
    """Angle in radians stored as its canonical representative."""

    value: float

    @classmethod
    def of(cls, t: float) -> 'Angle':
        return cls(wrap_angle(float(t)))

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class UnitVec:
    """Point of the unit circle S^1 in the plane."""

    x: float
    y: float

    @classmethod
    def from_angle(cls, t: float) -> 'UnitVec':
        vec = cls(math.cos(t), math.sin(t))
        if abs(vec.x * vec.x + vec.y * vec.y - 1.0) > UNIT_TOL:
            raise DomainError(f"angle {t} does not produce a unit vector")
        return vec

    @property
    def angle(self) -> float:
        return wrap_angle(math.atan2(self.y, self.x))

    def dot(self, other: 'UnitVec') -> float:
        return self.x * other.x + self.y * other.y

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


E1 = UnitVec(1.0, 0.0)
E2 = UnitVec(0.0, 1.0)


def _as_coeffs(values) -> np.ndarray:
    return np.asarray(values, dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Real trigonometric polynomial a0 + sum a_k cos kt + b_k sin kt."""

    a0: float = 0.0
    cos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        cos = _as_coeffs(self.cos)
        sin = _as_coeffs(self.sin)
        degree = max(cos.size, sin.size)
        object.__setattr__(self, 'a0', float(self.a0))
        object.__setattr__(self, 'cos', np.pad(cos, (0, degree - cos.size)))
        object.__setattr__(self, 'sin', np.pad(sin, (0, degree - sin.size)))

    @classmethod
    def zero(cls, degree: int = 0) -> 'TrigPolynomial':
        return cls(0.0, np.zeros(degree), np.zeros(degree))

    @classmethod
    def constant(cls, value: float) -> 'TrigPolynomial':
        return cls(value)

    @classmethod
    def mode(cls, k: int, kind: str = 'cos', amplitude: float = 1.0) -> 'TrigPolynomial':
        """Single Fourier mode ``amplitude * cos(kt)`` or ``amplitude * sin(kt)``."""
        if k < 0:
            raise DomainError(f"mode index must be nonnegative, got {k}")
        if k == 0:
            return cls(amplitude if kind == 'cos' else 0.0)
        coeffs = np.zeros(k)
        coeffs[k - 1] = amplitude
        if kind == 'cos':
            return cls(0.0, coeffs, np.zeros(k))
        if kind == 'sin':
            return cls(0.0, np.zeros(k), coeffs)
        raise DomainError(f"unknown mode kind '{kind}'")

    @property
    def degree(self) -> int:
        return int(self.cos.size)

    def padded(self, degree: int) -> 'TrigPolynomial':
        if degree < self.degree:
            raise DomainError("cannot pad to a lower degree")
        extra = degree - self.degree
        return TrigPolynomial(self.a0, np.pad(self.cos, (0, extra)), np.pad(self.sin, (0, extra)))

    def evaluate(self, t):
        """Evaluate at angle(s) ``t``; returns a float for scalar input."""
        t_arr = np.asarray(t, dtype=float)
        flat = t_arr.reshape(-1)
        values = np.full(flat.shape, self.a0)
        if self.degree:
            k = np.arange(1, self.degree + 1)
            phase = np.outer(flat, k)
            values = values + np.cos(phase) @ self.cos + np.sin(phase) @ self.sin
        if t_arr.ndim == 0:
            return float(values[0])
        return values.reshape(t_arr.shape)

    __call__ = evaluate

    def derivative(self) -> 'TrigPolynomial':
        k = np.arange(1, self.degree + 1)
        return TrigPolynomial(0.0, k * self.sin, -k * self.cos)

    def shift(self, a: float) -> 'TrigPolynomial':
        """Return the polynomial t -> f(t - a)."""
        k = np.arange(1, self.degree + 1)
        c, s = np.cos(k * a), np.sin(k * a)
        return TrigPolynomial(self.a0, self.cos * c - self.sin * s, self.cos * s + self.sin * c)

    def coefficient_vector(self) -> np.ndarray:
        """Flat vector (a0, a_1..a_D, b_1..b_D)."""
        return np.concatenate(([self.a0], self.cos, self.sin))

    def max_abs_coefficient(self) -> float:
        return float(np.max(np.abs(self.coefficient_vector())))

    def allclose(self, other: 'TrigPolynomial', tol: float = 1e-12) -> bool:
        degree = max(self.degree, other.degree)
        diff = self.padded(degree) - other.padded(degree)
        return diff.max_abs_coefficient() <= tol

    def sup_norm(self, samples: int = 4096) -> float:
        """Sampled estimate of max |f| on the circle."""
        t = circle_nodes(max(samples, 4 * self.degree + 1))
        return float(np.max(np.abs(self.evaluate(t))))

    def to_complex(self) -> np.ndarray:
        """Exponential coefficients c_n, n = -D..D, stored at index n + D."""
        degree = self.degree
        coeffs = np.zeros(2 * degree + 1, dtype=complex)
        coeffs[degree] = self.a0
        positive = 0.5 * (self.cos - 1j * self.sin)
        coeffs[degree + 1:] = positive
        coeffs[:degree] = np.conj(positive)[::-1]
        return coeffs

    def _binary(self, other: 'TrigPolynomial', sign: float) -> 'TrigPolynomial':
        degree = max(self.degree, other.degree)
        left, right = self.padded(degree), other.padded(degree)
        return TrigPolynomial(left.a0 + sign * right.a0,
                              left.cos + sign * right.cos,
                              left.sin + sign * right.sin)

    def __add__(self, other: 'TrigPolynomial') -> 'TrigPolynomial':
        return self._binary(other, 1.0)

    def __sub__(self, other: 'TrigPolynomial') -> 'TrigPolynomial':
        return self._binary(other, -1.0)

    def __neg__(self) -> 'TrigPolynomial':
        return TrigPolynomial(-self.a0, -self.cos, -self.sin)

    def __mul__(self, scalar: float) -> 'TrigPolynomial':
        return TrigPolynomial(scalar * self.a0, scalar * self.cos, scalar * self.sin)

    __rmul__ = __mul__

    def to_dict(self) -> Dict[str, Any]:
        return {'a0': self.a0, 'cos': self.cos.tolist(), 'sin': self.sin.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrigPolynomial':
        return cls(data.get('a0', 0.0), data.get('cos', []), data.get('sin', []))


def plane_from_complex(coeffs: np.ndarray) -> Tuple[TrigPolynomial, TrigPolynomial]:
    """Split a complex-valued series sum z_n e^{int} into (Re, Im) components.

    Args:
        coeffs: complex coefficients z_n for n = -D..D stored at index n + D

    Returns:
        Pair (P, Q) of real trig polynomials with P + iQ equal to the series
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    degree = (coeffs.size - 1) // 2
    zero = coeffs[degree]
    pos = coeffs[degree + 1:]
    neg = coeffs[:degree][::-1]
    real_part = TrigPolynomial(zero.real, pos.real + neg.real, -pos.imag + neg.imag)
    imag_part = TrigPolynomial(zero.imag, pos.imag + neg.imag, pos.real - neg.real)
    return real_part, imag_part


def circle_nodes(samples: int) -> np.ndarray:
    """Equispaced angles 2pi k / M, k = 0..M-1."""
    return TWO_PI * np.arange(samples) / samples


def fourier_analyze(samples) -> TrigPolynomial:
    """Interpolate equispaced samples by a trig polynomial of degree floor((M-1)/2).

    Args:
        samples: M real values at angles 2pi k / M

    Returns:
        TrigPolynomial; for even M the Nyquist mode is dropped
    """
    values = np.asarray(samples, dtype=float).reshape(-1)
    count = values.size
    if count < 3:
        raise SamplingError(f"need at least 3 samples for Fourier analysis, got {count}")
    degree = (count - 1) // 2
    spectrum = np.fft.rfft(values) / count
    return TrigPolynomial(spectrum[0].real,
                          2.0 * spectrum[1:degree + 1].real,
                          -2.0 * spectrum[1:degree + 1].imag)


def project_out_low_modes(f: TrigPolynomial) -> TrigPolynomial:
    """Remove the mean and the first Fourier modes; modes k >= 2 are kept."""
    cos = f.cos.copy()
    sin = f.sin.copy()
    if f.degree:
        cos[0] = 0.0
        sin[0] = 0.0
    return TrigPolynomial(0.0, cos, sin)


def antiderivative_zero_at_origin(g: TrigPolynomial, tol: float = 1e-12) -> TrigPolynomial:
    """Periodic antiderivative psi with psi' = g and psi(0) = 0.

    Raises:
        DomainError: if g has a nonzero mean (the antiderivative would not be periodic)
    """
    if abs(g.a0) > tol:
        raise DomainError(f"antiderivative needs a mean-zero integrand, got a0={g.a0:.3e}")
    k = np.arange(1, g.degree + 1)
    cos = -g.sin / k
    sin = g.cos / k
    return TrigPolynomial(float(np.sum(g.sin / k)), cos, sin)


def quadrature_circle(h: Callable, samples: int) -> float:
    """Periodic trapezoidal rule for the integral of h over [0, 2pi).

    Exact for trig polynomials of degree < samples / 2.
    """
    if samples < 16:
        raise SamplingError(f"circle quadrature needs at least 16 samples, got {samples}")
    t = circle_nodes(samples)
    values = np.broadcast_to(np.asarray(h(t), dtype=float), t.shape)
    return float(TWO_PI / samples * np.sum(values))
