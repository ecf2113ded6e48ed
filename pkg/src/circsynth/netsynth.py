"""Passive RC network synthesis from positive-real impedance functions.

Covers the classical route from a reduced impedance to a circuit:
positive-real verification, partial-fraction (Foster first kind) expansion
into a series capacitor + series resistor + parallel RC branches, and
continued-fraction (Cauer first/second kind) expansion into RC ladders,
plus exact impedance reconstruction and SPICE-style netlist export.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import (
    NotPositiveRealError,
    NotRCRealizableError,
    PassivityViolationError,
    UnsupportedPoleStructureError,
)
from .linearize import LTISystem
from .rational import RationalFunction, from_partial_fractions

TOL_PR = 1e-9
TOL_ZERO_POLE = 1e-9  # relative threshold for "pole at the origin"

TOPOLOGIES = ("classical", "dynamic", "ladder_cauer1", "ladder_cauer2")


# ---------------------------------------------------------------------------
# state space -> rational function
# ---------------------------------------------------------------------------

def ss_to_tf(sys: LTISystem) -> RationalFunction:
    """Exact rational impedance of a SISO state-space system.

    Poles come from the A eigenvalues, zeros from the invariant-zero pencil
    [[A, B], [C, D]] against diag(I, 0); near pole/zero cancellations are
    removed and recorded on the result.
    """
    n = sys.n
    if n == 0:
        return RationalFunction.constant(sys.D)
    poles = np.linalg.eigvals(sys.A)
    M1 = np.zeros((n + 1, n + 1))
    M1[:n, :n] = sys.A
    M1[:n, n] = sys.B
    M1[n, :n] = sys.C
    M1[n, n] = sys.D
    M2 = np.zeros((n + 1, n + 1))
    M2[:n, :n] = np.eye(n)
    zv = linalg.eig(M1, M2, right=False)
    scale = max(1.0, np.max(np.abs(poles)))
    zeros = zv[np.isfinite(zv) & (np.abs(zv) < 1e10 * scale)]

    if abs(sys.D) > 0.0:
        gain = float(sys.D)
    else:
        # strictly proper: match the gain at sample points clear of all roots
        samples = scale * np.array([1.7, 2.9, 4.3])
        est = []
        for s in samples:
            num = np.prod(s - zeros) if zeros.size else 1.0
            den = np.prod(s - poles)
            est.append((sys.eval_tf(complex(s)) * den / num).real)
        gain = float(np.median(est))
    return RationalFunction.from_zpk(zeros, poles, gain)


# ---------------------------------------------------------------------------
# positive-real verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PRVerdict:
    passed: bool
    reason: str | None
    real_axis_nonneg: bool  # Re G(s) >= 0 on the nonnegative real axis
    min_real_jw: float  # min of Re G(jw) over the sampled grid

    def __bool__(self) -> bool:
        return self.passed


def _freq_scale(G: RationalFunction) -> tuple[float, float]:
    mags = np.abs(np.concatenate([G.zeros, G.poles]))
    mags = mags[mags > 0.0]
    if mags.size == 0:
        return 1e-3, 1e3
    return float(mags.min()) * 1e-4, float(mags.max()) * 1e4


def is_positive_real(G: RationalFunction, tol: float = TOL_PR) -> PRVerdict:
    """Standard positive-real test for a real rational function.

    Checks properness, absence of open right-half-plane poles, simplicity
    and positive real residues of imaginary-axis poles, and
    Re G(jw) >= -tol on a dense sampled grid.  The verdict also reports the
    plain real-axis condition Re G(s) >= 0 for real s >= 0.
    """
    lo, hi = _freq_scale(G)
    s_real = np.concatenate([[0.0], np.logspace(np.log10(lo), np.log10(hi), 400)])
    with np.errstate(divide="ignore", invalid="ignore"):
        g_real = np.array([G(complex(s)) for s in s_real])
    finite = np.isfinite(g_real.real)
    real_axis_ok = bool(np.all(g_real.real[finite] >= -tol))

    def fail(reason: str, min_re: float = np.nan) -> PRVerdict:
        return PRVerdict(False, reason, real_axis_ok, min_re)

    if not G.is_proper:
        return fail("improper: more zeros than poles")
    pole_scale = max(1.0, *(abs(p) for p in G.poles)) if G.poles.size else 1.0
    for i, p in enumerate(G.poles):
        if p.real > tol * pole_scale:
            return fail(f"pole {p:.6g} in the open right half-plane")
        if abs(p.real) <= tol * pole_scale:  # imaginary-axis pole
            others = np.delete(G.poles, i)
            if others.size and np.min(np.abs(others - p)) <= tol * pole_scale:
                return fail(f"repeated imaginary-axis pole at {p:.6g}")
            k = G.residue_index(i)
            if k.real <= 0.0 or abs(k.imag) > 1e-6 * abs(k) + tol:
                return fail(f"axis pole at {p:.6g} has non-positive residue {k:.6g}")

    # sampled Re G(jw) with local refinement around the minimum
    w = np.concatenate([[0.0], np.logspace(np.log10(lo), np.log10(hi), 2000)])
    axis_poles = G.poles[np.abs(G.poles.real) <= tol * pole_scale]
    re = _re_on_axis(G, w, axis_poles, tol * pole_scale)
    k = int(np.nanargmin(re))
    min_re = float(re[k])
    if 0 < k < w.size - 1:
        for _ in range(3):
            wseg = np.linspace(max(w[k - 1], 1e-300), w[min(k + 1, w.size - 1)], 64)
            r2 = _re_on_axis(G, wseg, axis_poles, tol * pole_scale)
            j = int(np.nanargmin(r2))
            if r2[j] < min_re:
                min_re = float(r2[j])
            w, k = wseg, j
            if k in (0, wseg.size - 1):
                break
    if min_re < -tol:
        return fail(f"Re G(jw) = {min_re:.3e} < 0 on the imaginary axis", min_re)
    return PRVerdict(True, None, real_axis_ok, min_re)


def _re_on_axis(G, w, axis_poles, dist):
    out = np.full(w.shape, np.nan)
    for i, wi in enumerate(w):
        s = 1j * wi
        if axis_poles.size and np.min(np.abs(axis_poles - s)) <= max(dist, 1e-12 * wi):
            continue  # on top of an axis pole; Re is +inf there for PR functions
        out[i] = G(s).real
    return out


# ---------------------------------------------------------------------------
# Foster expansion (partial fractions about s = 0)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FosterExpansion:
    """G(s) = k0/s + sum k_i/(s + sigma_i) + k_inf with positive terms."""

    k0: float
    terms: tuple[tuple[float, float], ...]  # (k_i, sigma_i), fastest first
    k_inf: float

    def to_rational(self) -> RationalFunction:
        return from_partial_fractions(self.k0, self.terms, self.k_inf)


def foster_expand(G: RationalFunction) -> FosterExpansion:
    """Partial-fraction expansion of an RC-class impedance.

    Requires simple real poles on the closed left half axis; positive-real
    inputs give positive residues (resistor/capacitor realisable).
    """
    if not G.is_proper:
        raise UnsupportedPoleStructureError("improper impedance function")
    poles = G.poles
    scale = max(1.0, *(abs(p) for p in poles)) if poles.size else 1.0
    k0 = 0.0
    terms = []
    for i, p in enumerate(poles):
        if abs(p.imag) > 1e-8 * max(abs(p), 1e-30):
            raise UnsupportedPoleStructureError(f"complex pole {p:.6g}")
        others = np.delete(poles, i)
        if others.size and np.min(np.abs(others - p)) <= 1e-7 * scale:
            raise UnsupportedPoleStructureError(f"repeated pole near {p.real:.6g}")
        if p.real > TOL_ZERO_POLE * scale:
            raise UnsupportedPoleStructureError(
                f"pole {p.real:.6g} in the right half-plane"
            )
        k = G.residue_index(i)
        if abs(k.imag) > 1e-8 * abs(k):
            raise NotRCRealizableError(f"complex residue {k:.6g} at pole {p:.6g}")
        if abs(p) <= TOL_ZERO_POLE * scale:  # origin pole
            if k.real <= 0.0:
                raise NotRCRealizableError(
                    f"negative residue {k.real:.6g} at the origin pole"
                )
            k0 = float(k.real)
        else:
            if k.real <= 0.0:
                raise NotRCRealizableError(
                    f"negative residue {k.real:.6g} at pole {p.real:.6g}"
                )
            terms.append((float(k.real), float(-p.real)))
    k_inf = G.k_inf
    if k_inf < -TOL_PR:
        raise NotRCRealizableError(f"negative high-frequency limit {k_inf:.6g}")
    terms.sort(key=lambda t: -t[1])  # fastest branch first
    return FosterExpansion(k0=k0, terms=tuple(terms), k_inf=max(k_inf, 0.0))


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    """RC circuit with named component values (ohms and farads).

    classical/dynamic: optional series "C" and "R" plus parallel branches
    ("R1", "C1"), ...; ladder_cauer1: series "R1", shunt "C1", series "R2",
    ...; ladder_cauer2 the same with capacitors and resistors swapped.
    """

    topology: str
    components: dict
    branch_count: int

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        for name, value in self.components.items():
            if value <= 0.0:
                raise PassivityViolationError(
                    f"component {name} = {value:.6g} is not positive"
                )

    def ordered_elements(self) -> list[tuple[str, float]]:
        """Component (name, value) pairs in schematic order."""
        comps = dict(self.components)
        out = []
        if self.topology in ("classical", "dynamic"):
            for name in ("R", "C"):
                if name in comps:
                    out.append((name, comps.pop(name)))
            k = 1
            while f"R{k}" in comps or f"C{k}" in comps:
                for name in (f"R{k}", f"C{k}"):
                    if name in comps:
                        out.append((name, comps.pop(name)))
                k += 1
        else:
            first, second = ("R", "C") if self.topology == "ladder_cauer1" else ("C", "R")
            k = 1
            while f"{first}{k}" in comps or f"{second}{k}" in comps:
                for prefix in (first, second):
                    name = f"{prefix}{k}"
                    if name in comps:
                        out.append((name, comps.pop(name)))
                k += 1
        if comps:
            raise ValueError(f"components {sorted(comps)} do not fit {self.topology}")
        return out

    def to_state_space(self) -> LTISystem:
        """Realisation with the canonical topology structure.

        classical/dynamic give the diagonal form (integrator from a series
        capacitor plus one -1/(R_i C_i) mode per branch); ladders give the
        tridiagonal chain form.
        """
        if self.topology in ("classical", "dynamic"):
            return _ss_branches(self)
        return _ss_ladder(self)


def _ss_branches(c: Circuit) -> LTISystem:
    comps = c.components
    diags, binv = [], []
    if "C" in comps:
        diags.append(0.0)
        binv.append(1.0 / comps["C"])
    for k in range(1, c.branch_count + 1):
        R, C = comps[f"R{k}"], comps[f"C{k}"]
        diags.append(-1.0 / (R * C))
        binv.append(1.0 / C)
    n = len(diags)
    return LTISystem(
        A=np.diag(diags), B=np.array(binv), C=np.ones(n),
        D=comps.get("R", 0.0), labels=("circuit",) * n,
    )


def _ladder_roles(c: Circuit) -> list[tuple[str, str, float]]:
    """(role, type, value) per element: R is series in a first-kind ladder
    and shunt in a second-kind ladder; C the other way round."""
    series_type = "R" if c.topology == "ladder_cauer1" else "C"
    return [
        ("series" if name[0] == series_type else "shunt", name[0], value)
        for name, value in c.ordered_elements()
    ]


def _ss_ladder(c: Circuit) -> LTISystem:
    """State space of an RC ladder driven by the port current.

    States are the capacitor voltages.  The instantaneous node voltages
    v_0..v_m (v_0 at the port) and section currents i_1..i_m are solved from
    the chain relations, which yields the tridiagonal ladder coupling.
    """
    elems = _ladder_roles(c)
    if not elems:
        return LTISystem(np.zeros((0, 0)), np.zeros(0), np.zeros(0), 0.0, ())
    m = sum(1 for role, _, _ in elems if role == "series")
    caps = [(j, val) for j, (_, t, val) in enumerate(elems) if t == "C"]
    cap_no = {j: k for k, (j, _) in enumerate(caps)}
    nstate = len(caps)
    nun = (m + 1) + m  # v_0..v_m then i_1..i_m

    def iv(k):  # node voltage index
        return k

    def ii(k):  # section current index, k = 1..m
        return m + k

    M = np.zeros((nun, nun))
    Nu = np.zeros((nun, nstate))  # state contribution to the rhs
    ni = np.zeros(nun)  # port-current contribution
    row = 0
    node = 0
    sec = 0
    ends_series = elems[-1][0] == "series"
    for j, (role, typ, val) in enumerate(elems):
        if role == "series":
            sec += 1
            # element between node sec-1 and node sec
            M[row, iv(sec - 1)] = 1.0
            M[row, iv(sec)] = -1.0
            if typ == "R":
                M[row, ii(sec)] -= val  # v_{k-1} - v_k - R i_k = 0
            else:
                Nu[row, cap_no[j]] = 1.0  # v_{k-1} - v_k = u
            row += 1
            node = sec
        else:
            # KCL at the current node: inflow = shunt current + onward current
            inflow = np.zeros(nun)
            if node == 0:
                pass  # inflow is the port current itself
            else:
                inflow[ii(node)] = 1.0
            onward = np.zeros(nun)
            if node + 1 <= m:
                onward[ii(node + 1)] = 1.0
            if typ == "R":
                M[row] = inflow - onward
                M[row, iv(node)] -= 1.0 / val
                if node == 0:
                    ni[row] = -1.0
                row += 1
            else:
                # shunt capacitor voltage equals the node voltage
                M[row, iv(node)] = 1.0
                Nu[row, cap_no[j]] = 1.0
                row += 1
    if ends_series:
        M[row, iv(m)] = 1.0  # far node is the port return
        row += 1
    # KCL rows were consumed one per shunt; the i_1 relation at node 0 closes
    # the system when no shunt sits across the port
    if row < nun:
        kcl0 = np.zeros(nun)
        if m >= 1:
            kcl0[ii(1)] = 1.0
        M[row] = kcl0
        ni[row] = 1.0  # i_1 = i_port
        row += 1
    if row != nun:
        raise ValueError(f"inconsistent ladder element list for {c.topology}")

    sol_u = np.linalg.solve(M, Nu)  # unknowns as linear maps of (u, i_port)
    sol_i = np.linalg.solve(M, ni)

    # assemble du/dt = (charging current)/C and V = v_0
    A = np.zeros((nstate, nstate))
    B = np.zeros(nstate)
    for k, (j, val) in enumerate(caps):
        role = elems[j][0]
        if role == "series":
            sec_k = sum(1 for e in elems[: j + 1] if e[0] == "series")
            cur_u, cur_i = sol_u[ii(sec_k)], sol_i[ii(sec_k)]
        else:
            node_k = sum(1 for e in elems[:j] if e[0] == "series")
            inflow_u = sol_u[ii(node_k)] if node_k >= 1 else np.zeros(nstate)
            inflow_i = sol_i[ii(node_k)] if node_k >= 1 else 1.0
            if node_k + 1 <= m:
                cur_u = inflow_u - sol_u[ii(node_k + 1)]
                cur_i = inflow_i - sol_i[ii(node_k + 1)]
            else:
                cur_u, cur_i = inflow_u, inflow_i
        A[k] = cur_u / val
        B[k] = cur_i / val
    C = sol_u[iv(0)]
    D = float(sol_i[iv(0)])
    return LTISystem(A=A, B=B, C=C, D=D, labels=("circuit",) * nstate)


def synth_dynamic(G: RationalFunction) -> Circuit:
    """Foster-form synthesis: series C from the origin pole, series R from
    the high-frequency limit, one parallel RC branch per stable pole."""
    fe = foster_expand(G)
    comps = {}
    if fe.k0 > 0.0:
        comps["C"] = 1.0 / fe.k0
    if fe.k_inf > 0.0:
        comps["R"] = fe.k_inf
    for j, (k, sigma) in enumerate(fe.terms, start=1):
        comps[f"C{j}"] = 1.0 / k
        comps[f"R{j}"] = k / sigma
    return Circuit(topology="dynamic", components=comps,
                   branch_count=len(fe.terms))


def synth_classical(G: RationalFunction) -> Circuit:
    """Single-branch reduction of the Foster form.

    Keeps the branch with the largest low-frequency energy k_i/sigma_i
    (ties broken towards the slower branch).
    """
    fe = foster_expand(G)
    comps = {}
    if fe.k0 > 0.0:
        comps["C"] = 1.0 / fe.k0
    if fe.k_inf > 0.0:
        comps["R"] = fe.k_inf
    branches = 0
    if fe.terms:
        best = max(fe.terms, key=lambda t: (t[0] / t[1], 1.0 / t[1]))
        comps["R1"] = best[0] / best[1]
        comps["C1"] = 1.0 / best[0]
        branches = 1
    else:
        warnings.warn("no stable branch available; series RC only",
                      RuntimeWarning, stacklevel=2)
    return Circuit(topology="classical", components=comps, branch_count=branches)


# ---------------------------------------------------------------------------
# Cauer continued-fraction expansion
# ---------------------------------------------------------------------------

def _strip_leading(P: np.ndarray, floor: float) -> np.ndarray:
    k = 0
    while k < P.size and abs(P[k]) <= floor:
        k += 1
    return P[k:]


def cauer_expand(G: RationalFunction, kind: str = "first") -> Circuit:
    """RC ladder synthesis by continued-fraction expansion.

    kind="first" removes poles at s = infinity alternately from the
    impedance (series resistors) and the admittance (shunt capacitors);
    kind="second" removes poles at s = 0 (series capacitors alternating
    with shunt resistors).  Non-positive quotients mean the function is not
    an RC impedance; the error carries the partial quotient trace.
    """
    if kind not in ("first", "second"):
        raise ValueError(f"kind must be 'first' or 'second', got {kind!r}")
    if not G.is_proper:
        raise UnsupportedPoleStructureError("improper impedance function")
    if kind == "first":
        quotients = _cauer1_quotients(np.array(G.num), np.array(G.den))
        topology = "ladder_cauer1"
    else:
        quotients = _cauer2_quotients(np.array(G.num[::-1]), np.array(G.den[::-1]))
        topology = "ladder_cauer2"
    comps = {}
    counters = {"R": 0, "C": 0}
    branch = 0
    for typ, value in quotients:
        counters[typ] += 1
        comps[f"{typ}{counters[typ]}"] = value
        branch = max(branch, counters[typ])
    return Circuit(topology=topology, components=comps, branch_count=branch)


def _sub_padded(N: np.ndarray, a: float, D: np.ndarray, align: str) -> np.ndarray:
    """N - a*D with zero padding; "head" aligns index 0, "tail" the last index."""
    m = max(len(N), len(D))
    Np, Dp = np.zeros(m), np.zeros(m)
    if align == "head":
        Np[: len(N)] = N
        Dp[: len(D)] = D
    else:
        Np[m - len(N):] = N
        Dp[m - len(D):] = D
    return Np - a * Dp


def _cauer1_quotients(N: np.ndarray, D: np.ndarray) -> list[tuple[str, float]]:
    """Alternating division about s = infinity; descending coefficients.

    Resistors are the impedance values at infinity, capacitors the slopes
    of the admittance pole at infinity.
    """
    out: list[tuple[str, float]] = []
    rel = 1e-11
    impedance = True
    for _ in range(4 * (len(D) + len(N)) + 8):
        scale = np.max(np.abs(D))
        if scale == 0.0:
            return out
        N, D = N / scale, D / scale
        N = _strip_leading(N, rel)
        D = _strip_leading(D, rel * max(np.max(np.abs(D)), 1e-300))
        if N.size == 0 or np.max(np.abs(N)) <= rel:
            return out
        if impedance:
            if len(N) > len(D):
                raise UnsupportedPoleStructureError("impedance grows at infinity")
            if len(N) == len(D):  # resistance: impedance value at infinity
                a = N[0] / D[0]
                if a < -rel:
                    raise NotRCRealizableError(
                        f"negative series resistance quotient {a:.6g}", trace=out
                    )
                if a > rel:
                    out.append(("R", float(a)))
                N = N - a * D
                N[0] = 0.0
            else:
                N, D = D, N  # invert the strictly proper remainder
                impedance = False
        else:
            # admittance with a simple pole at infinity: Y ~ a s
            if len(N) != len(D) + 1:
                raise NotRCRealizableError(
                    "repeated pole at infinity (not an RC impedance)", trace=out
                )
            a = N[0] / D[0]
            if a <= rel:
                raise NotRCRealizableError(
                    f"non-positive shunt capacitance quotient {a:.6g}", trace=out
                )
            out.append(("C", float(a)))
            N = N - a * np.concatenate([D, [0.0]])
            N[0] = 0.0
            N, D = D, N  # back to an impedance
            impedance = True
    raise NotRCRealizableError("continued fraction failed to terminate", trace=out)


def _cauer2_quotients(N: np.ndarray, D: np.ndarray) -> list[tuple[str, float]]:
    """Alternating division about s = 0; ascending coefficients.

    Series capacitors remove impedance poles at the origin, shunt resistors
    remove the admittance value at the origin.
    """
    out: list[tuple[str, float]] = []
    rel = 1e-11
    impedance = True
    for _ in range(4 * (len(D) + len(N)) + 8):
        scale = np.max(np.abs(D))
        if scale == 0.0:
            return out
        N, D = N / scale, D / scale
        if N.size == 0 or np.max(np.abs(N)) <= rel:
            return out
        if impedance:
            if abs(D[0]) <= rel:  # impedance pole at s = 0
                Dt = D[1:]
                a = N[0] / Dt[0]
                if a <= rel:
                    raise NotRCRealizableError(
                        f"non-positive origin-pole quotient {a:.6g}", trace=out
                    )
                out.append(("C", float(1.0 / a)))  # impedance a/s -> C = 1/a
                N = _sub_padded(N, a, Dt, "head")
                N[0] = 0.0
                N = N[1:]  # divide the remainder by s
                D = Dt
            else:
                N, D = D, N
                impedance = False
        else:
            g = N[0] / D[0]  # admittance value at s = 0
            if g <= rel:
                raise NotRCRealizableError(
                    f"non-positive shunt conductance quotient {g:.6g}", trace=out
                )
            out.append(("R", float(1.0 / g)))
            N = _sub_padded(N, g, D, "head")
            N[0] = 0.0
            N, D = D, N
            impedance = True
    raise NotRCRealizableError("continued fraction failed to terminate", trace=out)


# ---------------------------------------------------------------------------
# circuit impedance and netlist export
# ---------------------------------------------------------------------------

def circuit_impedance(c: Circuit) -> RationalFunction:
    """Exact impedance by series/parallel rational composition."""
    comps = c.components
    if c.topology in ("classical", "dynamic"):
        Z = RationalFunction.constant(comps.get("R", 0.0))
        if "C" in comps:
            Z = Z + RationalFunction.from_zpk([], [0.0], 1.0 / comps["C"])
        for k in range(1, c.branch_count + 1):
            R, C = comps[f"R{k}"], comps[f"C{k}"]
            # R parallel C: R / (R C s + 1)
            Z = Z + RationalFunction.from_zpk([], [-1.0 / (R * C)], 1.0 / C)
        return Z
    # ladders: fold the continued fraction from the far end
    elems = _ladder_roles(c)
    Z = None
    for role, typ, value in reversed(elems):
        imp = (RationalFunction.constant(value) if typ == "R"
               else RationalFunction.from_zpk([], [0.0], 1.0 / value))
        if Z is None:
            Z = imp
        elif role == "series":
            Z = imp + Z
        else:
            Z = (imp.reciprocal() + Z.reciprocal()).reciprocal()
    return Z if Z is not None else RationalFunction.constant(0.0)


def export_netlist(c: Circuit, label: str) -> str:
    """SPICE-style netlist with deterministic node numbering.

    Header ``* circsynth <topology> <label>``; one line per element
    ``R<k>|C<k> <node+> <node-> <value>`` with 6-significant-digit
    lower-case scientific values; port between nodes 1 and 0; final
    ``.end``.  Elements appear in schematic order from the port.
    """
    lines = [f"* circsynth {c.topology} {label}"]
    counters = {"R": 0, "C": 0}

    def emit(typ: str, a: int, b: int, value: float):
        counters[typ] += 1
        lines.append(f"{typ}{counters[typ]} {a} {b} {value:.5e}")

    if c.topology in ("classical", "dynamic"):
        groups: list[list[tuple[str, float]]] = []
        comps = c.components
        for name in ("R", "C"):
            if name in comps:
                groups.append([(name[0], comps[name])])
        for k in range(1, c.branch_count + 1):
            groups.append([("R", comps[f"R{k}"]), ("C", comps[f"C{k}"])])
        node = 1
        for g, group in enumerate(groups):
            nxt = 0 if g == len(groups) - 1 else node + 1
            for typ, value in group:
                emit(typ, node, nxt, value)
            node = nxt
    else:
        node = 1
        elems = _ladder_roles(c)
        ends_series = bool(elems) and elems[-1][0] == "series"
        nseries = sum(1 for e in elems if e[0] == "series")
        sec = 0
        for role, typ, value in elems:
            if role == "series":
                sec += 1
                nxt = 0 if (ends_series and sec == nseries) else node + 1
                emit(typ, node, nxt, value)
                node = nxt
            else:
                emit(typ, node, 0, value)
    lines.append(".end")
    return "\n".join(lines) + "\n"
