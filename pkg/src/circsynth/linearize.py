"""Linearisation of the cell model about an equilibrium concentration.

States are deviations from (c = c_e, w = 0), which absorbs the constant
ln(c_e) offset: the logarithmic coupling contributes its Jacobian
B_ln / c_e on the concentration block, and zero input gives zero output
deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .model import NonlinearODE


@dataclass(frozen=True)
class LTISystem:
    """State-space quadruple with single current input and voltage output.

    ``labels`` tags each state as concentration ("c"), potential difference
    ("w") or, after integrator separation, "int".
    """

    A: np.ndarray
    B: np.ndarray  # (n,)
    C: np.ndarray  # (n,)
    D: float
    labels: tuple[str, ...]
    c_e: float | None = None

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.B.shape != (n,) or self.C.shape != (n,):
            raise ModelError("inconsistent state-space dimensions")
        if len(self.labels) != n:
            raise ModelError("one label per state required")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def eval_tf(self, s: complex | np.ndarray) -> complex | np.ndarray:
        """G(s) = C (sI - A)^-1 B + D, evaluated pointwise."""
        s = np.asarray(s)
        scalar = s.ndim == 0
        out = np.empty(np.atleast_1d(s).shape, dtype=complex)
        eye = np.eye(self.n)
        for k, sk in enumerate(np.atleast_1d(s)):
            out[k] = self.C @ np.linalg.solve(sk * eye - self.A, self.B) + self.D
        return complex(out[0]) if scalar else out

    def transform(self, T: np.ndarray) -> "LTISystem":
        """Similarity transform x -> T^-1 x (labels are kept positional)."""
        Tinv = np.linalg.inv(T)
        return LTISystem(
            A=Tinv @ self.A @ T, B=Tinv @ self.B, C=self.C @ T, D=self.D,
            labels=self.labels, c_e=self.c_e,
        )


def default_labels(model: NonlinearODE) -> tuple[str, ...]:
    return ("c",) * model.n_c + ("w",) * (model.n - model.n_c)


def linearize(model: NonlinearODE, c_e: float) -> LTISystem:
    """Linearise about the uniform equilibrium concentration c_e."""
    if not c_e > 0.0:
        raise ModelError("linearisation concentration must be positive (log singularity)")
    A = model.A.copy()
    A[:, : model.n_c] += model.B_ln / c_e
    C = model.C.copy()
    C[: model.n_c] += model.D_ln / c_e
    return LTISystem(A=A, B=model.B_i.copy(), C=C, D=model.D_i,
                     labels=default_labels(model), c_e=c_e)


def linearize_at_field(model: NonlinearODE, c_field: np.ndarray) -> LTISystem:
    """Jacobian linearisation at a (possibly non-uniform) concentration field.

    Mechanically supported for diagnostics; the tested contract is the
    uniform case, where this reduces to :func:`linearize`.
    """
    c_field = np.asarray(c_field, dtype=float)
    if c_field.shape != (model.n_c,) or np.any(c_field <= 0.0):
        raise ModelError("need a strictly positive field of length n_c")
    A = model.A.copy()
    A[:, : model.n_c] += model.B_ln / c_field
    C = model.C.copy()
    C[: model.n_c] += model.D_ln / c_field
    return LTISystem(A=A, B=model.B_i.copy(), C=C, D=model.D_i,
                     labels=default_labels(model), c_e=None)
