"""Discretised porous-electrode supercapacitor model.

The cell has three domains (electrode / separator / electrode) discretised
with Chebyshev collocation.  Unknowns are the electrolyte concentration c
(all domains), the potential difference w = phi1 - phi2 (electrodes only)
and the electrolyte potential phi2 (all domains).  Collocation rows at
domain ends are replaced by boundary/interface conditions (patching):

* current collectors: zero ionic flux dc/dx = 0, zero ionic current, and
  sigma * dphi1/dx = -i carried by the solid phase;
* electrode/separator interfaces: continuity of c, of the flux eps*D*dc/dx,
  of phi2 and of the ionic current, plus zero solid-phase current entering
  the separator;
* one node pins phi2 = 0 (the potential reference), replacing the boundary
  row at that node; the replaced condition stays enforced because the
  un-pinned row set is rank deficient by exactly one.

``assemble_cell`` builds the full descriptor form

    E * dz/dt = A z + B_ln ln(c) + B_i i,     y = C z + D_ln ln(c) + D_i i

with z = [c; w; phi2] and algebraic (zero-mass) rows for the boundary
conditions and the Ohm's-law block.  ``eliminate_phi2`` statically condenses
phi2 together with the boundary values of c and w, leaving a descriptor in
the interior values whose mass matrix is invertible; ``to_ode`` inverts it.

Model variants: ``kappa_of_c`` replaces the electrolyte conductivity by
kappa0 * c (the log coupling becomes linear in c), ``aC_of_phi`` replaces
the specific capacitance by alpha + beta * w in the mass matrix.  Both are
assembled as instantaneous coefficient matrices at a reference field and
re-evaluated lazily when linearising elsewhere.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .chebyshev import DiffMatrix, _diff_any_order, clenshaw_curtis_weights
from .errors import AssemblyError, EliminationError, ModelError
from .params import ModelParams, VARIANTS

MASS_COND_WARN = 1e12


@dataclass(frozen=True)
class Domain:
    """One collocation domain plus its position inside the global fields."""

    name: str
    grid: DiffMatrix
    c0: int  # start of this domain in the c/phi2 field
    w0: int  # start in the w field, -1 for the separator
    kappa: float
    D: float
    eps: float
    sigma: float  # 0 in the separator

    @property
    def n(self) -> int:
        return self.grid.npts

    @property
    def is_electrode(self) -> bool:
        return self.w0 >= 0


@dataclass(frozen=True)
class CellLayout:
    """Index bookkeeping for the assembled full-variable system."""

    params: ModelParams
    domains: tuple[Domain, ...]
    n_c: int
    n_w: int
    n_p: int
    x_c: np.ndarray  # node positions of the c/phi2 field
    eps_c: np.ndarray  # porosity at each c node
    quad_w: np.ndarray  # Clenshaw-Curtis weights per c node
    c_bnd: np.ndarray  # boundary indices within the c field
    c_int: np.ndarray
    w_bnd: np.ndarray  # boundary indices within the w field
    w_int: np.ndarray
    phi2_ref: int  # pinned phi2 node (index within the phi2 field), -1 if unset

    @property
    def n_z(self) -> int:
        return self.n_c + self.n_w + self.n_p

    @property
    def c_sl(self) -> slice:
        return slice(0, self.n_c)

    @property
    def w_sl(self) -> slice:
        return slice(self.n_c, self.n_c + self.n_w)

    @property
    def p_sl(self) -> slice:
        return slice(self.n_c + self.n_w, self.n_z)


@dataclass(frozen=True)
class FieldRecovery:
    """Affine maps reconstructing eliminated quantities from interior states.

    c_full = Tc @ c_int, and (by the patched log-field convention)
    ln(c)_full = Tc @ ln(c_int).  The stacked vector q = [phi2_full; w_bnd]
    is q = Qw w_int + Qc c_int + Qln ln(c_int) + qi * i.
    """

    layout: CellLayout
    Tc: np.ndarray
    Qw: np.ndarray
    Qc: np.ndarray
    Qln: np.ndarray
    qi: np.ndarray

    def c_full(self, c_int: np.ndarray) -> np.ndarray:
        return self.Tc @ c_int

    def _q(self, c_int, w_int, i):
        return (
            self.Qw @ w_int
            + self.Qc @ c_int
            + self.Qln @ np.log(c_int)
            + self.qi * i
        )

    def phi2(self, c_int: np.ndarray, w_int: np.ndarray, i: float) -> np.ndarray:
        return self._q(c_int, w_int, i)[: self.layout.n_p]

    def w_full(self, c_int: np.ndarray, w_int: np.ndarray, i: float) -> np.ndarray:
        lay = self.layout
        w = np.empty(lay.n_w)
        w[lay.w_int] = w_int
        w[lay.w_bnd] = self._q(c_int, w_int, i)[lay.n_p:]
        return w


@dataclass
class DescriptorSystem:
    """Descriptor model E x' = A x + B_ln ln(c) + B_i i with voltage output.

    Assembled instances carry the full variable vector [c; w; phi2] and a
    singular mass matrix; eliminated instances carry interior [c; w] states,
    a block upper-triangular invertible mass matrix and a recovery map.
    """

    mass: np.ndarray
    dyn: np.ndarray
    B_ln: np.ndarray  # columns follow the c portion of the state
    B_i: np.ndarray
    C: np.ndarray
    D_ln: np.ndarray
    D_i: float
    layout: CellLayout
    variant: str
    eliminated: bool = False
    recovery: FieldRecovery | None = None

    @property
    def n(self) -> int:
        return self.dyn.shape[0]

    @property
    def n_c_states(self) -> int:
        return self.B_ln.shape[1]

    def to_json_dict(self) -> dict:
        """Row-major dump of the assembled matrices for debugging."""

        def arr(a):
            a = np.atleast_2d(np.asarray(a, dtype=float))
            return {"shape": list(a.shape), "data_row_major": a.ravel().tolist()}

        return {
            "variant": self.variant,
            "eliminated": self.eliminated,
            "n_states": self.n,
            "n_c_states": self.n_c_states,
            "matrices": {
                "mass": arr(self.mass),
                "dyn": arr(self.dyn),
                "B_ln": arr(self.B_ln),
                "B_i": arr(self.B_i),
                "C": arr(self.C),
                "D_ln": arr(self.D_ln),
                "D_i": arr([[self.D_i]]),
            },
        }

    def to_json(self, indent: int = 0) -> str:
        return json.dumps(self.to_json_dict(), indent=indent or None, sort_keys=True)


@dataclass
class NonlinearODE:
    """Standard-form model dx/dt = A x + B1 ln(c) + B2 i after mass inversion."""

    A: np.ndarray
    B_ln: np.ndarray
    B_i: np.ndarray
    C: np.ndarray
    D_ln: np.ndarray
    D_i: float
    layout: CellLayout
    variant: str
    recovery: FieldRecovery
    warnings: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_c(self) -> int:
        return self.B_ln.shape[1]

    def split_state(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return x[: self.n_c], x[self.n_c:]

    def equilibrium(self, c_e: float | None = None) -> np.ndarray:
        c_e = self.layout.params.c_init if c_e is None else c_e
        x = np.zeros(self.n)
        x[: self.n_c] = c_e
        return x

    def f(self, x: np.ndarray, i: float) -> np.ndarray:
        return self.A @ x + self.B_ln @ np.log(x[: self.n_c]) + self.B_i * i

    def jac(self, x: np.ndarray) -> np.ndarray:
        J = self.A.copy()
        J[:, : self.n_c] += self.B_ln / x[: self.n_c]
        return J

    def output(self, x: np.ndarray, i: float) -> float:
        return float(self.C @ x + self.D_ln @ np.log(x[: self.n_c]) + self.D_i * i)


def _build_layout(params: ModelParams, phi2_ref: int | None) -> CellLayout:
    ne, ns = params.N_electrode, params.N_separator
    le, ls = params.L_electrode, params.L_separator
    g_ea = _diff_any_order(ne - 1, 0.0, le)
    g_sp = _diff_any_order(ns - 1, le, le + ls)
    g_eb = _diff_any_order(ne - 1, le + ls, 2 * le + ls)
    domains = (
        Domain("electrode_a", g_ea, 0, 0,
               params.kappa_electrode, params.D_electrode,
               params.eps_electrode, params.sigma),
        Domain("separator", g_sp, ne, -1,
               params.kappa_separator, params.D_separator,
               params.eps_separator, 0.0),
        Domain("electrode_b", g_eb, ne + ns, ne,
               params.kappa_electrode, params.D_electrode,
               params.eps_electrode, params.sigma),
    )
    n_c = 2 * ne + ns
    x_c = np.concatenate([d.grid.nodes for d in domains])
    eps_c = np.concatenate([np.full(d.n, d.eps) for d in domains])
    quad_w = np.concatenate(
        [clenshaw_curtis_weights(d.grid.order, d.grid.nodes[0], d.grid.nodes[-1])
         for d in domains]
    )
    c_bnd = np.array(sorted({d.c0 for d in domains} | {d.c0 + d.n - 1 for d in domains}))
    c_int = np.setdiff1d(np.arange(n_c), c_bnd)
    w_bnd = np.array([0, ne - 1, ne, 2 * ne - 1])
    w_int = np.setdiff1d(np.arange(2 * ne), w_bnd)
    if phi2_ref is None:
        phi2_ref = -1  # no reference; elimination will fail on purpose
    elif not 0 <= phi2_ref < n_c:
        raise AssemblyError(f"phi2 reference node {phi2_ref} outside 0..{n_c - 1}")
    return CellLayout(
        params=params, domains=domains, n_c=n_c, n_w=2 * ne, n_p=n_c,
        x_c=x_c, eps_c=eps_c, quad_w=quad_w,
        c_bnd=c_bnd, c_int=c_int, w_bnd=w_bnd, w_int=w_int, phi2_ref=phi2_ref,
    )


def assemble_cell(
    params: ModelParams,
    variant: str = "baseline",
    ref_c: np.ndarray | float | None = None,
    ref_w: np.ndarray | float | None = None,
    phi2_ref: int = 0,
) -> DescriptorSystem:
    """Assemble the three-domain descriptor system.

    Parameters
    ----------
    params : cell parameters.
    variant : "baseline", "kappa_of_c" (conductivity kappa0*c) or
        "aC_of_phi" (capacitance alpha + beta*w).
    ref_c, ref_w : reference fields at which the state-dependent variant
        coefficients are evaluated (uniform c_init and zero by default).
        Scalars broadcast; arrays must have the length of the c/w fields.
    phi2_ref : node of the phi2 field pinned to zero.
    """
    if variant not in VARIANTS:
        raise ModelError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    lay = _build_layout(params, phi2_ref)
    n_c, n_w, n_p, n_z = lay.n_c, lay.n_w, lay.n_p, lay.n_z

    c_ref = np.full(n_c, params.c_init, dtype=float)
    if ref_c is not None:
        c_ref[:] = ref_c
    w_ref = np.zeros(n_w)
    if ref_w is not None:
        w_ref[:] = ref_w
    if np.any(c_ref <= 0):
        raise ModelError("reference concentration must be strictly positive")

    theta = params.thermal_factor  # R T (t+ - t-) / F
    cc = params.charge_coupling  # (t- dq+/dq + t+ dq-/dq) / F

    if variant == "kappa_of_c":
        kappa_c = params.kappa0 * c_ref  # per node, both domain types
    else:
        kappa_c = np.concatenate(
            [np.full(d.n, d.kappa) for d in lay.domains]
        )
    if variant == "aC_of_phi":
        aC_w = params.alpha + params.beta * w_ref  # per w node
    else:
        aC_w = np.full(n_w, params.aC)

    E = np.zeros((n_z, n_z))
    A = np.zeros((n_z, n_z))
    B_ln = np.zeros((n_z, n_c))
    B_i = np.zeros(n_z)

    c_of = 0
    w_of = n_c
    p_of = n_c + n_w

    def csl(d: Domain) -> slice:
        return slice(c_of + d.c0, c_of + d.c0 + d.n)

    def wsl(d: Domain) -> slice:
        return slice(w_of + d.w0, w_of + d.w0 + d.n)

    def psl(d: Domain) -> slice:
        return slice(p_of + d.c0, p_of + d.c0 + d.n)

    def ionic_current_row(row: int, d: Domain, j: int, sign: float):
        """Add sign * [ionic current expression] at local node j of domain d.

        The ionic current is -kappa (dphi2/dx + theta dln(c)/dx); rows use the
        bracketed expression so "zero ionic current" is expression = 0.
        """
        D1j = d.grid.D1[j, :]
        if variant == "kappa_of_c":
            kap = params.kappa0 * c_ref[d.c0 + j]
            A[row, psl(d)] += sign * kap * D1j
            # kappa * theta * dln(c)/dx == kappa0 * theta * dc/dx exactly
            A[row, csl(d)] += sign * params.kappa0 * theta * D1j
        else:
            A[row, psl(d)] += sign * d.kappa * D1j
            B_ln[row, d.c0: d.c0 + d.n] += sign * d.kappa * theta * D1j

    ea, sp, eb = lay.domains

    # ---- c rows -----------------------------------------------------------
    for d in lay.domains:
        for j in range(d.n):
            row = c_of + d.c0 + j
            if j in (0, d.n - 1):
                continue  # boundary rows filled below
            E[row, c_of + d.c0 + j] = d.eps
            if d.is_electrode:
                E[row, w_of + d.w0 + j] = aC_w[d.w0 + j] * cc
            A[row, csl(d)] = d.D * d.grid.D2[j, :]

    # collector flux rows
    A[c_of + ea.c0, csl(ea)] = ea.grid.D1[0, :]
    A[c_of + eb.c0 + eb.n - 1, csl(eb)] = eb.grid.D1[-1, :]
    # interface 1: value continuity on the electrode side, flux on the separator side
    row = c_of + ea.c0 + ea.n - 1
    A[row, c_of + ea.c0 + ea.n - 1] = 1.0
    A[row, c_of + sp.c0] = -1.0
    row = c_of + sp.c0
    A[row, csl(ea)] = ea.eps * ea.D * ea.grid.D1[-1, :]
    A[row, csl(sp)] -= sp.eps * sp.D * sp.grid.D1[0, :]
    # interface 2: flux on the separator side, value on the electrode side
    row = c_of + sp.c0 + sp.n - 1
    A[row, csl(sp)] = sp.eps * sp.D * sp.grid.D1[-1, :]
    A[row, csl(eb)] -= eb.eps * eb.D * eb.grid.D1[0, :]
    row = c_of + eb.c0
    A[row, c_of + sp.c0 + sp.n - 1] = 1.0
    A[row, c_of + eb.c0] = -1.0

    # ---- w rows (charge conservation in the electrodes) -------------------
    for d in (ea, eb):
        for j in range(1, d.n - 1):
            row = w_of + d.w0 + j
            E[row, w_of + d.w0 + j] = aC_w[d.w0 + j]
            A[row, wsl(d)] = d.sigma * d.grid.D2[j, :]
            A[row, psl(d)] = d.sigma * d.grid.D2[j, :]
        # solid-phase current rows: sigma d(w + phi2)/dx = i at the collectors
        # (positive current enters at x = L so V = phi1(L) - phi1(0) rises
        # during charge and the impedance is positive real), and
        # sigma d(w + phi2)/dx = 0 at the separator interfaces
        for j, at_collector in ((0, d is ea), (d.n - 1, d is eb)):
            row = w_of + d.w0 + j
            A[row, wsl(d)] = d.sigma * d.grid.D1[j, :]
            A[row, psl(d)] = d.sigma * d.grid.D1[j, :]
            if at_collector:
                B_i[row] = -1.0

    # ---- phi2 rows ---------------------------------------------------------
    for d in lay.domains:
        for j in range(1, d.n - 1):
            row = p_of + d.c0 + j
            if d.is_electrode:
                A[row, wsl(d)] = d.sigma * d.grid.D1[j, :]
                A[row, psl(d)] = d.sigma * d.grid.D1[j, :]
            ionic_current_row(row, d, j, 1.0)
            B_i[row] = -1.0

    # collectors: zero ionic current
    ionic_current_row(p_of + ea.c0, ea, 0, 1.0)
    ionic_current_row(p_of + eb.c0 + eb.n - 1, eb, eb.n - 1, 1.0)
    # interface 1: phi2 continuity on the electrode side, current continuity
    # on the separator side
    row = p_of + ea.c0 + ea.n - 1
    A[row, p_of + ea.c0 + ea.n - 1] = 1.0
    A[row, p_of + sp.c0] = -1.0
    row = p_of + sp.c0
    ionic_current_row(row, ea, ea.n - 1, 1.0)
    ionic_current_row(row, sp, 0, -1.0)
    # interface 2 mirrored
    row = p_of + sp.c0 + sp.n - 1
    ionic_current_row(row, sp, sp.n - 1, 1.0)
    ionic_current_row(row, eb, 0, -1.0)
    row = p_of + eb.c0
    A[row, p_of + sp.c0 + sp.n - 1] = 1.0
    A[row, p_of + eb.c0] = -1.0

    # potential reference replaces the boundary row at the pinned node
    if lay.phi2_ref >= 0:
        row = p_of + lay.phi2_ref
        A[row, :] = 0.0
        B_ln[row, :] = 0.0
        B_i[row] = 0.0
        A[row, p_of + lay.phi2_ref] = 1.0

    # ---- output: V = phi1(L) - phi1(0) -------------------------------------
    C = np.zeros(n_z)
    C[w_of + eb.w0 + eb.n - 1] = 1.0
    C[p_of + eb.c0 + eb.n - 1] = 1.0
    C[w_of + ea.w0] = -1.0
    C[p_of + ea.c0] = -1.0

    sys = DescriptorSystem(
        mass=E, dyn=A, B_ln=B_ln, B_i=B_i, C=C,
        D_ln=np.zeros(n_c), D_i=0.0, layout=lay, variant=variant,
    )
    _check_algebraic_blocks(sys)
    return sys


def _boundary_row_names(lay: CellLayout) -> dict[int, str]:
    names = {}
    ea, sp, eb = lay.domains
    c_of, w_of, p_of = 0, lay.n_c, lay.n_c + lay.n_w
    names[c_of + ea.c0] = "c flux at collector A"
    names[c_of + ea.c0 + ea.n - 1] = "c continuity at interface 1"
    names[c_of + sp.c0] = "c flux continuity at interface 1"
    names[c_of + sp.c0 + sp.n - 1] = "c flux continuity at interface 2"
    names[c_of + eb.c0] = "c continuity at interface 2"
    names[c_of + eb.c0 + eb.n - 1] = "c flux at collector B"
    names[w_of + ea.w0] = "solid current at collector A"
    names[w_of + ea.w0 + ea.n - 1] = "zero solid current at interface 1"
    names[w_of + eb.w0] = "zero solid current at interface 2"
    names[w_of + eb.w0 + eb.n - 1] = "solid current at collector B"
    names[p_of + ea.c0] = "zero ionic current at collector A"
    names[p_of + ea.c0 + ea.n - 1] = "phi2 continuity at interface 1"
    names[p_of + sp.c0] = "ionic current continuity at interface 1"
    names[p_of + sp.c0 + sp.n - 1] = "ionic current continuity at interface 2"
    names[p_of + eb.c0] = "phi2 continuity at interface 2"
    names[p_of + eb.c0 + eb.n - 1] = "zero ionic current at collector B"
    names[p_of + lay.phi2_ref] = "phi2 reference pin"
    return names


def _name_offending_row(M: np.ndarray, rows: np.ndarray, lay: CellLayout) -> str:
    """Identify the row most involved in a singular algebraic block."""
    _, s, vh = np.linalg.svd(M.T)
    null = vh[-1]
    worst = rows[int(np.argmax(np.abs(null)))]
    return _boundary_row_names(lay).get(worst, f"equation row {worst}")


def _equilibrate_rows(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each row by its max-abs entry (rows of very different physical
    scale would otherwise defeat rank/conditioning tests)."""
    M = np.array(M, dtype=float)
    scale = np.max(np.abs(M), axis=1)
    scale[scale == 0.0] = 1.0
    return M / scale[:, None], scale


def _check_algebraic_blocks(sys: DescriptorSystem) -> None:
    lay = sys.layout
    # c boundary block: boundary values must be solvable from the BC rows.
    # Equilibrate by the full row scale, then test the boundary-column block.
    rows = lay.c_bnd
    full, _ = _equilibrate_rows(sys.dyn[rows, : lay.n_c])
    Bb = full[:, lay.c_bnd]
    if np.linalg.matrix_rank(Bb, tol=1e-10) < len(rows):
        raise AssemblyError(
            "singular concentration boundary block near: "
            + _name_offending_row(Bb, rows, lay)
        )


def _algebraic_partition(sys: DescriptorSystem):
    lay = sys.layout
    c_of, w_of, p_of = 0, lay.n_c, lay.n_c + lay.n_w
    alg_rows = np.concatenate([p_of + np.arange(lay.n_p), w_of + lay.w_bnd])
    alg_cols = alg_rows  # rows are aligned with variables
    return alg_rows, alg_cols


def eliminate_phi2(sys: DescriptorSystem) -> DescriptorSystem:
    """Condense phi2 and the boundary values of c and w out of the system.

    Returns a descriptor over the interior [c; w] values with block
    upper-triangular mass [[M11, M12], [0, M22]] and a
    :class:`FieldRecovery` that reconstructs the eliminated quantities.
    """
    if sys.eliminated:
        raise ModelError("system already eliminated")
    lay = sys.layout
    c_of, w_of, p_of = 0, lay.n_c, lay.n_c + lay.n_w
    n_ci, n_wi = len(lay.c_int), len(lay.w_int)

    # fold the (homogeneous, linear) concentration boundary conditions
    rows = lay.c_bnd
    Bb = sys.dyn[np.ix_(rows, c_of + lay.c_bnd)]
    Bi_ = sys.dyn[np.ix_(rows, c_of + lay.c_int)]
    try:
        Sc = -np.linalg.solve(Bb, Bi_)
    except np.linalg.LinAlgError as exc:
        raise AssemblyError(
            "singular concentration boundary block near: "
            + _name_offending_row(Bb, rows, lay)
        ) from exc
    Tc = np.zeros((lay.n_c, n_ci))
    Tc[lay.c_int, :] = np.eye(n_ci)
    Tc[lay.c_bnd, :] = Sc

    # joint solve for q = [phi2_full; w_bnd], with row equilibration so the
    # conditioning test compares like with like across derivative/continuity rows
    alg_rows, alg_cols = _algebraic_partition(sys)
    G = sys.dyn[np.ix_(alg_rows, alg_cols)].copy()
    scale = np.max(np.abs(G), axis=1)
    scale[scale == 0.0] = 1.0
    G /= scale[:, None]
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > 1e12:
        raise EliminationError(
            "algebraic potential block is singular (missing or duplicate "
            "phi2 reference); most involved row: "
            + _name_offending_row(G, alg_rows, lay)
        )
    rhs_w = sys.dyn[np.ix_(alg_rows, w_of + lay.w_int)]
    rhs_c = sys.dyn[:, c_of: c_of + lay.n_c][alg_rows, :] @ Tc
    rhs_ln = sys.B_ln[alg_rows, :] @ Tc
    rhs_i = sys.B_i[alg_rows]
    rhs = np.column_stack([rhs_w, rhs_c, rhs_ln, rhs_i]) / scale[:, None]
    sol = -np.linalg.solve(G, rhs)
    Qw = sol[:, :n_wi]
    Qc = sol[:, n_wi: n_wi + n_ci]
    Qln = sol[:, n_wi + n_ci: n_wi + n_ci + n_ci]
    qi = sol[:, -1]
    recovery = FieldRecovery(layout=lay, Tc=Tc, Qw=Qw, Qc=Qc, Qln=Qln, qi=qi)

    # substitute into the dynamic rows
    dyn_rows = np.concatenate([c_of + lay.c_int, w_of + lay.w_int])
    n = n_ci + n_wi
    S_alg = sys.dyn[np.ix_(dyn_rows, alg_cols)]  # coupling to eliminated vars
    A_red = np.zeros((n, n))
    A_red[:, :n_ci] = (
        sys.dyn[np.ix_(dyn_rows, c_of + np.arange(lay.n_c))] @ Tc
        + S_alg @ Qc
    )
    A_red[:, n_ci:] = sys.dyn[np.ix_(dyn_rows, w_of + lay.w_int)] + S_alg @ Qw
    B1 = sys.B_ln[dyn_rows, :] @ Tc + S_alg @ Qln
    B2 = sys.B_i[dyn_rows] + S_alg @ qi

    M = np.zeros((n, n))
    M[:, :n_ci] = sys.mass[np.ix_(dyn_rows, c_of + lay.c_int)]
    M[:, n_ci:] = sys.mass[np.ix_(dyn_rows, w_of + lay.w_int)]

    C_red = np.zeros(n)
    C_alg = sys.C[alg_cols]
    C_red[:n_ci] = sys.C[c_of: c_of + lay.n_c] @ Tc + C_alg @ Qc
    C_red[n_ci:] = sys.C[w_of + lay.w_int] + C_alg @ Qw
    D_ln = sys.D_ln @ Tc + C_alg @ Qln
    D_i = float(sys.D_i + C_alg @ qi)

    return DescriptorSystem(
        mass=M, dyn=A_red, B_ln=B1, B_i=B2, C=C_red, D_ln=D_ln, D_i=D_i,
        layout=lay, variant=sys.variant, eliminated=True, recovery=recovery,
    )


def to_ode(sys: DescriptorSystem) -> NonlinearODE:
    """Invert the mass matrix of an eliminated descriptor system."""
    if not sys.eliminated:
        raise ModelError("eliminate_phi2 must run before to_ode")
    cond = np.linalg.cond(sys.mass)
    notes = []
    if not np.isfinite(cond):
        raise ModelError("mass matrix is singular")
    if cond > MASS_COND_WARN:
        msg = f"mass matrix is ill conditioned (cond = {cond:.3e})"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    Minv = np.linalg.inv(sys.mass)
    return NonlinearODE(
        A=Minv @ sys.dyn,
        B_ln=Minv @ sys.B_ln,
        B_i=Minv @ sys.B_i,
        C=sys.C.copy(),
        D_ln=sys.D_ln.copy(),
        D_i=sys.D_i,
        layout=sys.layout,
        variant=sys.variant,
        recovery=sys.recovery,
        warnings=notes,
    )


def build_ode(
    params: ModelParams,
    variant: str = "baseline",
    ref_c: np.ndarray | float | None = None,
    ref_w: np.ndarray | float | None = None,
    phi2_ref: int = 0,
) -> NonlinearODE:
    """assemble_cell -> eliminate_phi2 -> to_ode in one call."""
    return to_ode(eliminate_phi2(assemble_cell(params, variant, ref_c, ref_w, phi2_ref)))


def conserved_ion_content(ode: NonlinearODE, c_int: np.ndarray) -> float:
    """Integral of eps * c over the cell (mol per unit cross-section)."""
    lay = ode.layout
    c_full = ode.recovery.c_full(c_int)
    return float(lay.quad_w @ (lay.eps_c * c_full))
