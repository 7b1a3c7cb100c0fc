"""Parameter sets, thermal populations, and the bias condition.

Units: hbar = 1 throughout; Boltzmann's constant defaults to k = 1 but is
configurable through :class:`PhysicalConstants` so SI-style inputs remain
possible.  Energies, rates and temperatures are therefore mutually
dimensionless unless a k is supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ParameterError(ValueError):
    """An engine parameter violates a model precondition."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants entering the thermal populations (hbar is fixed at 1)."""

    k: float = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise ParameterError(f"Boltzmann constant must be positive, got k={self.k}")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ThermalPopulation:
    """Two-level thermal occupation: r for the lower level, rbar for the upper.

    Satisfies r + rbar = 1 and rbar = r * exp(-E/kT) to machine precision.
    """

    r: float
    rbar: float

    def __post_init__(self):
        if abs(self.r + self.rbar - 1.0) > 1e-12:
            raise ParameterError("thermal populations must sum to 1")


def thermal_population(E, T, consts=DEFAULT_CONSTANTS):
    """Thermal populations of a two-level transition with gap ``E`` at temperature ``T``.

    Parameters
    ----------
    E : float
        Level separation (energy), must be positive.
    T : float
        Bath temperature, must be positive.
    consts : PhysicalConstants
        Supplies Boltzmann's constant.

    Returns
    -------
    ThermalPopulation
        r = 1/(1 + exp(-E/kT)) and rbar = 1 - r, computed from the shared
        denominator so the ratio rbar/r = exp(-E/kT) is exact to rounding.
    """
    if not E > 0:
        raise ParameterError(f"level separation must be positive, got E={E}")
    if not T > 0:
        raise ParameterError(f"temperature must be positive, got T={T}")
    x = math.exp(-E / (consts.k * T))
    d = 1.0 + x
    return ThermalPopulation(r=1.0 / d, rbar=x / d)


@dataclass(frozen=True)
class TwoQubitEngineParams:
    """All physical constants of the two-qubit + weight engine.

    Qubit 1 (gap E1) couples to the cold bath at Tc with reset rate p1;
    qubit 2 (gap E2) couples to the hot bath at Th with reset rate p2.
    The weight ladder spacing is E2 - E1, forced by the degeneracy condition
    between |01,n> and |10,n+1>.

    The interaction strength g may be zero: a g = 0 engine is a well-posed
    (if idle) configuration used by stationarity tests.
    """

    E1: float
    E2: float
    g: float
    p1: float
    p2: float
    Tc: float
    Th: float
    consts: PhysicalConstants = field(default=DEFAULT_CONSTANTS)

    def __post_init__(self):
        if not self.E1 > 0:
            raise ParameterError(f"E1 must be positive, got {self.E1}")
        if not self.E2 > 0:
            raise ParameterError(f"E2 must be positive, got {self.E2}")
        if not self.E2 > self.E1:
            raise ParameterError(
                f"need E2 > E1 so the ladder spacing E2 - E1 is positive, "
                f"got E1={self.E1}, E2={self.E2}"
            )
        if self.g < 0:
            raise ParameterError(f"g must be non-negative, got {self.g}")
        if not (self.p1 > 0 and self.p2 > 0):
            raise ParameterError(f"reset rates must be positive, got p1={self.p1}, p2={self.p2}")
        if not self.Tc > 0:
            raise ParameterError(f"Tc must be positive, got {self.Tc}")
        if not self.Th > self.Tc:
            raise ParameterError(f"need Th > Tc, got Tc={self.Tc}, Th={self.Th}")

    @property
    def ladder_spacing(self):
        """Weight quantum: E2 - E1."""
        return self.E2 - self.E1

    def r1(self):
        """Thermal populations of qubit 1 against the cold bath."""
        return thermal_population(self.E1, self.Tc, self.consts)

    def r2(self):
        """Thermal populations of qubit 2 against the hot bath."""
        return thermal_population(self.E2, self.Th, self.consts)


@dataclass(frozen=True)
class QutritEngineParams:
    """All physical constants of the qutrit + weight engine.

    Qutrit levels sit at 0, E1, E1 + E2.  Each transition talks to its own
    bath: 0<->1 to the cold bath (Tc, rate pc), 0<->2 to the "room" bath
    (Tr, rate pr), 1<->2 to the hot bath (Th, rate ph).  The weight ladder
    spacing is E2, forced by the degeneracy of |2,n> and |1,n+1>.
    """

    E1: float
    E2: float
    g: float
    pc: float
    pr: float
    ph: float
    Tc: float
    Tr: float
    Th: float
    consts: PhysicalConstants = field(default=DEFAULT_CONSTANTS)

    def __post_init__(self):
        if not (self.E1 > 0 and self.E2 > 0):
            raise ParameterError(f"energy gaps must be positive, got E1={self.E1}, E2={self.E2}")
        if self.g < 0:
            raise ParameterError(f"g must be non-negative, got {self.g}")
        for name in ("pc", "pr", "ph"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"reset rate {name} must be positive, got {getattr(self, name)}")
        for name in ("Tc", "Tr", "Th"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"temperature {name} must be positive, got {getattr(self, name)}")

    @property
    def ladder_spacing(self):
        """Weight quantum: E2 (the 1<->2 gap)."""
        return self.E2

    def rc(self):
        """Thermal populations of the 0<->1 transition (gap E1) at Tc."""
        return thermal_population(self.E1, self.Tc, self.consts)

    def rr(self):
        """Thermal populations of the 0<->2 transition (gap E1 + E2) at Tr."""
        return thermal_population(self.E1 + self.E2, self.Tr, self.consts)

    def rh(self):
        """Thermal populations of the 1<->2 transition (gap E2) at Th."""
        return thermal_population(self.E2, self.Th, self.consts)


@dataclass(frozen=True)
class LadderWindow:
    """Truncation window [n_min, n_max] of the weight ladder, with spacing.

    The initial weight position n0 must be strictly interior.  ``spacing``
    is the ladder quantum: E2 - E1 for the two-qubit model, E2 for the
    qutrit; builders check it against the parameter set.
    """

    n_min: int
    n_max: int
    n0: int = 0
    spacing: float = 1.0

    def __post_init__(self):
        if not (self.n_min < self.n0 < self.n_max):
            raise ParameterError(
                f"need n_min < n0 < n_max, got [{self.n_min}, {self.n_max}] with n0={self.n0}"
            )
        if self.size < 3:
            raise ParameterError(f"window must span at least 3 sites, got {self.size}")
        if not self.spacing > 0:
            raise ParameterError(f"ladder spacing must be positive, got {self.spacing}")

    @property
    def size(self):
        """Number of ladder sites."""
        return self.n_max - self.n_min + 1

    def indices(self):
        """Ladder quantum numbers n as a list, n_min..n_max inclusive."""
        return list(range(self.n_min, self.n_max + 1))


@dataclass(frozen=True)
class BiasReport:
    """Joint thermal probabilities of |01> vs |10> and the lifting bias flag."""

    q01: float
    q10: float
    biased: bool
    bias_gap: float


def joint_bias(params: TwoQubitEngineParams) -> BiasReport:
    """Evaluate the population bias that decides whether the weight is lifted.

    q01 = r1*rbar2 is the no-interaction probability of |01>, q10 = rbar1*r2
    that of |10>.  The machine lifts the weight when q01 > q10, equivalently
    when E1/Tc > E2/Th; ``bias_gap`` is E1/(k Tc) - E2/(k Th).
    """
    t1 = params.r1()
    t2 = params.r2()
    q01 = t1.r * t2.rbar
    q10 = t1.rbar * t2.r
    k = params.consts.k
    gap = params.E1 / (k * params.Tc) - params.E2 / (k * params.Th)
    return BiasReport(q01=q01, q10=q10, biased=gap > 0, bias_gap=gap)


def validate_weak_coupling(params) -> list[str]:
    """Warn when g or a reset rate leaves the weak-coupling regime.

    The reduced descriptions are derived assuming g and the p's are small
    against every energy gap; the rule of thumb used here is 10% of the
    smallest of E1, E2 and the ladder spacing.  Returns a list of warning
    strings (empty when the parameters look safe); never raises.
    """
    scale = 0.1 * min(params.E1, params.E2, params.ladder_spacing)
    warnings = []
    if params.g > scale:
        warnings.append(
            f"g={params.g} exceeds the weak-coupling scale {scale:g}; "
            "reduced-dynamics formulas may drift from the simulation"
        )
    if isinstance(params, TwoQubitEngineParams):
        rates = [("p1", params.p1), ("p2", params.p2)]
    else:
        rates = [("pc", params.pc), ("pr", params.pr), ("ph", params.ph)]
    for name, p in rates:
        if p > scale:
            warnings.append(
                f"{name}={p} exceeds the weak-coupling scale {scale:g}; "
                "the reset model is only consistent for slow thermalization"
            )
    return warnings
