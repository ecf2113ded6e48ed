"""Physical, geometric and discretisation parameters of the cell model.

Default values are the published electrode/separator/global parameter set
for the porous-electrode supercapacitor, plus configurable geometry
(electrode and separator thickness, cross-section area) and an equilibrium
concentration.  All quantities are SI.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .errors import ConfigError

FARADAY = 96485.33212  # C/mol
GAS_CONSTANT = 8.314462618  # J/(mol K)

VARIANTS = ("baseline", "kappa_of_c", "aC_of_phi")


@dataclass(frozen=True)
class ModelParams:
    """Parameter set for the two-electrode / separator cell.

    ``aC`` is the specific double-layer capacitance per electrode volume,
    ``dq_plus_dq``/``dq_minus_dq`` the surface-charge derivatives, ``t_plus``
    the cation transference number (t_minus = 1 - t_plus), ``kappa0`` the
    conductivity slope for the kappa(c) = kappa0*c variant, and
    ``alpha``/``beta`` the affine capacitance law aC = alpha + beta*(phi1-phi2).
    """

    aC: float = 42e6  # F/m^3 (specific area times areal capacitance)
    sigma: float = 0.0521  # S/m, electrode solid-phase conductivity
    kappa_electrode: float = 0.0195  # S/m
    kappa_separator: float = 0.0312  # S/m
    D_electrode: float = 2.09e-12  # m^2/s
    D_separator: float = 3.34e-12  # m^2/s
    eps_electrode: float = 0.67
    eps_separator: float = 0.6
    t_plus: float = 0.55
    dq_plus_dq: float = -0.5
    dq_minus_dq: float = -0.5
    T: float = 298.0  # K
    F_const: float = FARADAY
    R_const: float = GAS_CONSTANT
    L_electrode: float = 50e-6  # m
    L_separator: float = 25e-6  # m
    area: float = 1.0  # m^2
    c_init: float = 930.0  # mol/m^3
    kappa0: float = 0.0195 / 930.0  # S m^2/mol, kappa_electrode / c_init
    alpha: float = 42e6  # F/m^3
    beta: float = 10e6  # F/(m^3 V)
    N_electrode: int = 6  # collocation points per electrode
    N_separator: int = 6  # collocation points in the separator

    def __post_init__(self):
        positive = (
            "aC", "sigma", "kappa_electrode", "kappa_separator",
            "D_electrode", "D_separator", "eps_electrode", "eps_separator",
            "T", "F_const", "R_const", "L_electrode", "L_separator",
            "area", "c_init", "kappa0", "alpha",
        )
        for name in positive:
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"parameter {name} must be strictly positive")
        if not 0.0 < self.t_plus < 1.0:
            raise ConfigError("t_plus must lie strictly between 0 and 1")
        if self.N_electrode < 3:
            raise ConfigError("N_electrode must be >= 3")
        if self.N_separator < 2:
            raise ConfigError("N_separator must be >= 2")

    @property
    def t_minus(self) -> float:
        return 1.0 - self.t_plus

    @property
    def thermal_factor(self) -> float:
        """Diffusion-potential coefficient R*T*(t_minus - t_plus)/F in volts.

        Carries the junction-potential sign (1 - 2*t_plus) of concentrated
        solution theory; with the published parameter set this makes the slow
        diffusion branch of the impedance capacitive (positive residue), as
        the published component tables require.
        """
        return self.R_const * self.T * (self.t_minus - self.t_plus) / self.F_const

    @property
    def charge_coupling(self) -> float:
        """(t_minus*dq+/dq + t_plus*dq-/dq)/F, mass-matrix coupling (mol/C)."""
        return (self.t_minus * self.dq_plus_dq + self.t_plus * self.dq_minus_dq) / self.F_const

    def with_updates(self, **kw) -> "ModelParams":
        return replace(self, **kw)


_INT_FIELDS = {"N_electrode", "N_separator"}


def parse_config_text(text: str) -> tuple[dict, dict]:
    """Parse flat ``key = value`` config text.

    Returns ``(param_items, run_items)``.  Keys before any section header
    belong to the model parameters; keys inside a ``[run]`` section configure
    the pipeline.  Unknown parameter keys raise :class:`ConfigError`.
    """
    known = {f.name for f in fields(ModelParams)}
    param_items: dict = {}
    run_items: dict = {}
    section = "params"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in ("run", "params"):
                raise ConfigError(f"line {lineno}: unknown section [{name}]")
            section = name
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if section == "params":
            if key not in known:
                raise ConfigError(f"line {lineno}: unknown parameter {key!r}")
            try:
                param_items[key] = int(value) if key in _INT_FIELDS else float(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
        else:
            run_items[key] = value
    return param_items, run_items


def load_params(path: str) -> tuple[ModelParams, dict]:
    """Read a config file and build :class:`ModelParams` plus raw run keys."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    param_items, run_items = parse_config_text(text)
    return ModelParams(**param_items), run_items
