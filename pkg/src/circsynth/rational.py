"""Real rational functions in the Laplace variable.

The factored zero/pole/gain view is the primary representation (far better
conditioned than raw coefficients for impedances whose critical frequencies
span many decades); coefficient arrays are derived from it.  Pole/zero pairs
closer than ``TOL_CANCEL`` (relative) are cancelled and recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL_CANCEL = 1e-7


def _realify(roots: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Zero out negligible imaginary parts (relative to the root magnitude)."""
    roots = np.asarray(roots, dtype=complex)
    out = roots.copy()
    small = np.abs(out.imag) <= tol * np.maximum(np.abs(out), 1.0e-300)
    out[small] = out[small].real
    return out


def _sort_roots(roots: np.ndarray) -> np.ndarray:
    return np.array(
        sorted(roots, key=lambda r: (r.real, abs(r.imag), r.imag)), dtype=complex
    )


@dataclass(frozen=True)
class RationalFunction:
    """G(s) = gain * prod(s - zeros) / prod(s - poles)."""

    zeros: np.ndarray
    poles: np.ndarray
    gain: float
    cancelled: tuple = field(default_factory=tuple)

    @classmethod
    def from_zpk(cls, zeros, poles, gain, cancel: bool = True) -> "RationalFunction":
        z = np.asarray(zeros, dtype=complex).ravel()
        p = np.asarray(poles, dtype=complex).ravel()
        z = _sort_roots(_realify(z))
        p = _sort_roots(_realify(p))
        cancelled = ()
        if cancel:
            z, p, cancelled = _cancel_pairs(z, p)
        return cls(zeros=z, poles=p, gain=float(gain), cancelled=cancelled)

    @classmethod
    def from_coeffs(cls, num, den) -> "RationalFunction":
        num = _trim_leading(np.atleast_1d(np.asarray(num, dtype=float)))
        den = _trim_leading(np.atleast_1d(np.asarray(den, dtype=float)))
        if den.size == 0:
            raise ZeroDivisionError("zero denominator polynomial")
        if num.size == 0:
            return cls.from_zpk([], np.roots(den), 0.0)
        gain = num[0] / den[0]
        return cls.from_zpk(np.roots(num), np.roots(den), gain)

    @classmethod
    def constant(cls, value: float) -> "RationalFunction":
        return cls(zeros=np.zeros(0, dtype=complex),
                   poles=np.zeros(0, dtype=complex), gain=float(value))

    # -- views ---------------------------------------------------------------
    @property
    def num(self) -> np.ndarray:
        return np.real(np.poly(self.zeros) * self.gain) if self.zeros.size \
            else np.array([self.gain])

    @property
    def den(self) -> np.ndarray:
        return np.real(np.poly(self.poles)) if self.poles.size else np.array([1.0])

    @property
    def degree(self) -> tuple[int, int]:
        return len(self.zeros), len(self.poles)

    @property
    def is_proper(self) -> bool:
        return len(self.zeros) <= len(self.poles)

    @property
    def k_inf(self) -> float:
        """Value at s -> infinity (0 if strictly proper)."""
        nz, npo = self.degree
        if nz < npo:
            return 0.0
        if nz == npo:
            return self.gain
        raise ValueError("improper rational function has no finite limit")

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.full(s.shape, self.gain, dtype=complex)
        for z in self.zeros:
            out = out * (s - z)
        for p in self.poles:
            out = out / (s - p)
        return out if out.ndim else complex(out)

    # -- algebra ---------------------------------------------------------------
    def __mul__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        return RationalFunction.from_zpk(
            np.concatenate([self.zeros, other.zeros]),
            np.concatenate([self.poles, other.poles]),
            self.gain * other.gain,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        if self.gain == 0.0:
            raise ZeroDivisionError("reciprocal of the zero function")
        return RationalFunction.from_zpk(self.poles, self.zeros, 1.0 / self.gain)

    def __truediv__(self, other) -> "RationalFunction":
        return self * _as_rational(other).reciprocal()

    def __add__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        if self.gain == 0.0:
            return other
        if other.gain == 0.0:
            return self
        num = np.polyadd(
            np.polymul(self.num, other.den), np.polymul(other.num, self.den)
        )
        den = np.polymul(self.den, other.den)
        if np.allclose(num, 0.0, atol=1e-300):
            return RationalFunction.constant(0.0)
        return RationalFunction.from_coeffs(num, den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(self.zeros, self.poles, -self.gain, self.cancelled)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-_as_rational(other))

    def residue_index(self, i: int) -> complex:
        """Residue at the simple pole ``poles[i]`` from the factored form."""
        pole = self.poles[i]
        k = complex(self.gain)
        for z in self.zeros:
            k *= pole - z
        for j, p in enumerate(self.poles):
            if j != i:
                k /= pole - p
        return k


def _trim_leading(coeffs: np.ndarray) -> np.ndarray:
    """Strip leading coefficients that are negligible against the largest."""
    if coeffs.size == 0:
        return coeffs
    floor = 1e-13 * np.max(np.abs(coeffs))
    k = 0
    while k < coeffs.size - 1 and abs(coeffs[k]) <= floor:
        k += 1
    out = coeffs[k:]
    return out if np.any(out) else out[:0]


def _as_rational(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.constant(float(x))


def _cancel_pairs(z: np.ndarray, p: np.ndarray, tol: float = TOL_CANCEL):
    """Cancel zero/pole pairs with relative distance below tol.

    Roots at the numerical-noise floor of the dominant root scale (for
    example the exactly-cancelling integrator pole/zero pairs of a combined
    realisation) are treated as coincident.
    """
    z, p = list(z), list(p)
    mags = [abs(r) for r in z] + [abs(r) for r in p]
    atol = 1e-12 * max(mags, default=0.0)
    cancelled = []
    done = False
    while not done:
        done = True
        for i, zi in enumerate(z):
            for j, pj in enumerate(p):
                scale = max(abs(zi), abs(pj), 1e-30)
                if abs(zi - pj) <= max(tol * scale, atol):
                    cancelled.append((complex(zi), complex(pj)))
                    z.pop(i)
                    p.pop(j)
                    done = False
                    break
            if not done:
                break
    return (np.array(z, dtype=complex), np.array(p, dtype=complex),
            tuple(cancelled))


def from_partial_fractions(k0: float, terms, k_inf: float) -> RationalFunction:
    """Build k0/s + sum k_i/(s + sigma_i) + k_inf as a rational function."""
    G = RationalFunction.constant(float(k_inf))
    if k0:
        G = G + RationalFunction.from_zpk([], [0.0], k0)
    for k, sigma in terms:
        G = G + RationalFunction.from_zpk([], [-sigma], k)
    return G
