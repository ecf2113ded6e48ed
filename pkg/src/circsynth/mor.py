"""Balanced truncation with explicit integrator separation.

The linearised cell model carries three integrator modes (total ion content
and one double-layer charge level per electrode), so plain balanced
truncation does not apply directly.  ``reduce`` splits the integrators off
by a Schur-based spectral projection, balances and truncates the remaining
Hurwitz subsystem, recombines, and reports the Hankel spectrum together
with the lumped series capacitance carried by the integrators.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import (
    AmbiguousSplitError,
    DegeneracyError,
    PassivityViolationError,
    StabilityError,
)
from .linearize import LTISystem

GRAMMIAN_RANK_TOL = 1e-12
GRAMMIAN_RANK_SLACK = 2
TIE_TOL = 1e-9
SPLIT_TOL = 1e-8


@dataclass(frozen=True)
class Grammians:
    Xc: np.ndarray  # controllability
    Yo: np.ndarray  # observability


@dataclass(frozen=True)
class BalancedRealization:
    Abal: np.ndarray
    Bbal: np.ndarray
    Cbal: np.ndarray
    D: float
    hsv: np.ndarray
    T: np.ndarray
    Tinv: np.ndarray


@dataclass(frozen=True)
class ReductionReport:
    r: int
    hsv: np.ndarray
    lower_bound: float
    measured_error: float
    lumped_C: float

    def to_json_dict(self) -> dict:
        return {
            "r": int(self.r),
            "hsv": [float(s) for s in self.hsv],
            "lower_bound": float(self.lower_bound),
            "measured_error": float(self.measured_error),
            "lumped_C": float(self.lumped_C),
        }

    def to_json(self, indent: int = 0) -> str:
        return json.dumps(self.to_json_dict(), indent=indent or None, sort_keys=True)


def solve_lyapunov(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Solve A X + X A^T + Q = 0 for symmetric PSD Q and Hurwitz A."""
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    ev = np.linalg.eigvals(A)
    if np.any(ev.real >= 0.0):
        raise StabilityError(
            f"matrix is not Hurwitz (max Re eig = {ev.real.max():.3e})"
        )
    X = linalg.solve_continuous_lyapunov(A, -Q)
    return 0.5 * (X + X.T)


def grammians(sys: LTISystem) -> Grammians:
    Xc = solve_lyapunov(sys.A, np.outer(sys.B, sys.B))
    Yo = solve_lyapunov(sys.A.T, np.outer(sys.C, sys.C))
    return Grammians(Xc=Xc, Yo=Yo)


def _dominant_labels(T, Tinv, labels):
    """Label transformed states by their dominant participation factor."""
    part = np.abs(T * Tinv.T)  # part[i, j]: original state i in new state j
    return tuple(labels[int(np.argmax(part[:, j]))] for j in range(T.shape[1]))


def split_integrators(
    sys: LTISystem, tol: float = SPLIT_TOL
) -> tuple[tuple[np.ndarray, np.ndarray], LTISystem]:
    """Spectral projection separating near-zero modes from the Hurwitz part.

    Returns ``((B_int, C_int), stable_sys)``.  Eigenvalues must fall either
    inside |lambda| <= tol*scale (integrators) or Re lambda < -tol*scale
    (Hurwitz); anything in between, or a defective zero cluster, raises
    :class:`AmbiguousSplitError`.
    """
    A = sys.A
    ev = np.linalg.eigvals(A)
    scale = float(np.max(np.abs(ev)))
    if scale == 0.0:  # everything is an integrator; scale off the matrix itself
        scale = max(float(np.linalg.norm(A, ord="fro")), 1e-300)
    is_zero = np.abs(ev) <= tol * scale
    is_stable = ev.real < -tol * scale
    gap = ~(is_zero | is_stable)
    if np.any(gap):
        bad = ev[gap]
        raise AmbiguousSplitError(
            f"eigenvalues {bad} are neither integrators (|l| <= {tol * scale:.3e}) "
            f"nor strictly stable"
        )
    k = int(np.sum(is_zero))
    if k == 0:
        empty = np.zeros(0)
        return (empty, empty), sys
    if k == sys.n:
        T, Z = linalg.schur(A, output="real")
    else:
        T, Z, sdim = linalg.schur(
            A, output="real",
            sort=lambda re, im: np.hypot(re, im) <= tol * scale,
        )
        if sdim != k:
            raise AmbiguousSplitError(
                f"Schur reordering selected {sdim} near-zero modes, expected {k}"
            )
    T11 = T[:k, :k]
    if np.max(np.abs(T11)) > 10.0 * tol * scale:
        raise AmbiguousSplitError(
            "near-zero cluster is defective (Jordan-coupled integrators); "
            f"restriction norm {np.max(np.abs(T11)):.3e}"
        )
    if k == sys.n:
        B_int = Z.T @ sys.B
        C_int = sys.C @ Z
        stable = LTISystem(
            A=np.zeros((0, 0)), B=np.zeros(0), C=np.zeros(0), D=sys.D,
            labels=(), c_e=sys.c_e,
        )
        return (B_int, C_int), stable
    # decouple the (1,2) block: W = [[I, X], [0, I]] with T11 X - X T22 = -T12
    T12 = T[:k, k:]
    T22 = T[k:, k:]
    X = linalg.solve_sylvester(T11, -T22, -T12)
    V = Z.copy()
    V[:, k:] = Z[:, k:] + Z[:, :k] @ X  # V = Z @ [[I, X], [0, I]]
    Vinv = np.linalg.inv(V)
    Bt = Vinv @ sys.B
    Ct = sys.C @ V
    new_labels = _dominant_labels(V, Vinv, sys.labels)
    stable = LTISystem(
        A=T22, B=Bt[k:], C=Ct[k:], D=sys.D,
        labels=new_labels[k:], c_e=sys.c_e,
    )
    return (Bt[:k], Ct[:k]), stable


def lumped_capacitance(B_int: np.ndarray, C_int: np.ndarray) -> float:
    """Series capacitor equivalent to the integrator modes.

    The integrators contribute dV/dt = (C_int @ B_int) * i, so the series
    capacitance is the reciprocal of that voltage slope.
    """
    if B_int.size == 0:
        raise PassivityViolationError("integrator part is empty")
    slope = float(np.dot(np.atleast_1d(C_int), np.atleast_1d(B_int)))
    if slope <= 0.0:
        raise PassivityViolationError(
            f"integrator voltage slope {slope:.3e} is not positive "
            "(unobservable or non-passive integrator)"
        )
    return 1.0 / slope


def _psd_factor(X: np.ndarray) -> tuple[np.ndarray, int]:
    """Eigenvalue square-root factor of a PSD matrix plus its numerical rank."""
    w, U = np.linalg.eigh(0.5 * (X + X.T))
    wmax = float(w.max())
    if wmax <= 0.0:
        return np.zeros_like(X), 0
    rank = int(np.sum(w > GRAMMIAN_RANK_TOL * wmax))
    return U * np.sqrt(np.clip(w, 0.0, None)), rank


def balance(sys: LTISystem) -> BalancedRealization:
    """Square-root balanced realisation of a Hurwitz system.

    Rank loss in one grammian beyond the other signals a structural loss of
    controllability or observability and raises :class:`DegeneracyError`.
    A matched rank deficit in both (for example the even-parity modes of a
    mirror-symmetric cell, which neither the input excites nor the output
    sees) is benign: those modes land at the bottom of the Hankel spectrum
    and truncation discards them.
    """
    gram = grammians(sys)
    Lc, rank_c = _psd_factor(gram.Xc)
    Lo, rank_o = _psd_factor(gram.Yo)
    if rank_o < rank_c - GRAMMIAN_RANK_SLACK:
        raise DegeneracyError(
            "observability",
            f"observability grammian rank {rank_o} is deficient against "
            f"controllability rank {rank_c}: unobservable dynamics",
        )
    if rank_c < rank_o - GRAMMIAN_RANK_SLACK:
        raise DegeneracyError(
            "controllability",
            f"controllability grammian rank {rank_c} is deficient against "
            f"observability rank {rank_o}: uncontrollable dynamics",
        )
    U, s, Vh = np.linalg.svd(Lo.T @ Lc)
    sqrt_s = np.sqrt(np.maximum(s, s[0] * 1e-250))  # keep exact zeros finite
    T = Lc @ Vh.T / sqrt_s
    Tinv = (U.T @ Lo.T) / sqrt_s[:, None]
    return BalancedRealization(
        Abal=Tinv @ sys.A @ T, Bbal=Tinv @ sys.B, Cbal=sys.C @ T,
        D=sys.D, hsv=s, T=T, Tinv=Tinv,
    )


def balance_and_truncate(
    sys: LTISystem, r: int
) -> tuple[LTISystem, BalancedRealization]:
    """Balanced truncation of a Hurwitz SISO system to order r.

    Equal singular values at the truncation boundary would make the split
    basis dependent, so a tied group is kept whole (with a warning).
    """
    if not 1 <= r <= sys.n:
        raise ValueError(f"target order r={r} outside 1..{sys.n}")
    ev = np.linalg.eigvals(sys.A)
    if np.any(ev.real >= 0.0):
        raise StabilityError("balanced truncation requires a Hurwitz system")
    bal = balance(sys)
    hsv = bal.hsv
    while r < sys.n and (hsv[r - 1] - hsv[r]) <= TIE_TOL * hsv[r - 1]:
        warnings.warn(
            f"Hankel singular values {r} and {r + 1} are tied; keeping the group",
            RuntimeWarning, stacklevel=2,
        )
        r += 1
    labels = _dominant_labels(bal.T, bal.Tinv, sys.labels)
    reduced = LTISystem(
        A=bal.Abal[:r, :r], B=bal.Bbal[:r], C=bal.Cbal[:r], D=bal.D,
        labels=labels[:r], c_e=sys.c_e,
    )
    return reduced, bal


def mode_labels(bal: BalancedRealization, labels) -> tuple[str, ...]:
    """Dominant-origin label ("c" or "w") for each balanced mode."""
    return _dominant_labels(bal.T, bal.Tinv, labels)


def sampled_hinf_error(
    G1: LTISystem,
    G2: LTISystem | None = None,
    w_min: float = 1e-6,
    w_max: float = 1e4,
    n_points: int = 2000,
    refine: int = 4,
) -> float:
    """Max over sampled frequencies of |G1(jw) - G2(jw)| (or |G1| if G2 is None).

    Dense log-spaced sampling with local grid refinement around the peak.
    """

    def gap(w):
        s = 1j * w
        g = G1.eval_tf(s)
        if G2 is not None:
            g = g - G2.eval_tf(s)
        return np.abs(g)

    w = np.logspace(np.log10(w_min), np.log10(w_max), n_points)
    vals = gap(w)
    best_w = w[int(np.argmax(vals))]
    best = float(np.max(vals))
    span = np.log10(w[1] / w[0])
    for _ in range(refine):
        lo, hi = np.log10(best_w) - span, np.log10(best_w) + span
        w = np.logspace(lo, hi, 64)
        vals = gap(w)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_w = float(vals[k]), w[k]
        span /= 8.0
    return best


def combine_with_integrators(
    B_int: np.ndarray, C_int: np.ndarray, stable: LTISystem, c_e=None
) -> LTISystem:
    k = B_int.size
    n = k + stable.n
    A = np.zeros((n, n))
    A[k:, k:] = stable.A
    B = np.concatenate([B_int, stable.B])
    C = np.concatenate([C_int, stable.C])
    return LTISystem(A=A, B=B, C=C, D=stable.D,
                     labels=("int",) * k + tuple(stable.labels), c_e=c_e)


def _rescale_states(sys: LTISystem) -> LTISystem:
    """Diagonal similarity scaling (matrix balancing) of the state basis.

    The physical states mix units of very different magnitude (mol/m^3
    against volts); balancing keeps the grammian rank tests and the Schur
    reordering well conditioned.  The input/output map is unchanged.
    """
    _, T = linalg.matrix_balance(sys.A, permute=False, separate=False)
    d = np.diag(T)
    return LTISystem(
        A=sys.A * (d[None, :] / d[:, None]), B=sys.B / d, C=sys.C * d,
        D=sys.D, labels=sys.labels, c_e=sys.c_e,
    )


def reduce(
    full: LTISystem, r_stable: int, tol: float = SPLIT_TOL
) -> tuple[LTISystem, ReductionReport]:
    """Integrator-preserving balanced truncation of the full linearised model.

    The stable subsystem is truncated to ``r_stable`` states (0 keeps only
    the integrators plus feedthrough) and recombined with the integrator
    modes; the report carries the Hankel spectrum, the truncation lower
    bound, a sampled H-infinity error and the lumped series capacitance.
    """
    (B_int, C_int), stable = split_integrators(_rescale_states(full), tol=tol)
    lumped = lumped_capacitance(B_int, C_int)
    if r_stable == 0:
        reduced_stable = LTISystem(
            A=np.zeros((0, 0)), B=np.zeros(0), C=np.zeros(0), D=stable.D,
            labels=(), c_e=full.c_e,
        )
        hsv = balance(stable).hsv if stable.n else np.zeros(0)
        lower = float(hsv[0]) if hsv.size else 0.0
        measured = sampled_hinf_error(stable) if stable.n else 0.0
    else:
        reduced_stable, bal = balance_and_truncate(stable, r_stable)
        hsv = bal.hsv
        r_eff = reduced_stable.n
        lower = float(hsv[r_eff]) if r_eff < hsv.size else 0.0
        measured = sampled_hinf_error(stable, reduced_stable)
    reduced = combine_with_integrators(B_int, C_int, reduced_stable, c_e=full.c_e)
    report = ReductionReport(
        r=reduced_stable.n, hsv=hsv, lower_bound=lower,
        measured_error=measured, lumped_C=lumped,
    )
    return reduced, report
