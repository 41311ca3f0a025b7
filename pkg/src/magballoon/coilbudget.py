"""Engineering budget arithmetic for the coil system.

Resistance, ohmic power, wire mass, uniform-slew kinematics, kinetic
energy, average power, membrane pressure floor, and skin depth, plus an
aggregated pass/fail report for a scenario.

Constants: copper resistivity defaults to 0.0175 ohm mm^2/m (the value
consistent with the reference resistance of 1.645 ohm over a 94 m loop;
0.017 gives 1.598 and is selectable).
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

VACUUM_PERMEABILITY = 4.0e-7 * math.pi  # H/m
SPEED_OF_LIGHT = 2.998e8                # m/s
COPPER_RESISTIVITY_OHM_MM2_PER_M = 0.0175
COPPER_DENSITY_KG_M3 = 8960.0
GOLD_DENSITY_KG_M3 = 19300.0


@dataclass(frozen=True)
class WireSpec:
    """One coil's conductor: resistivity in ohm mm^2/m, section in mm^2."""

    resistivity: float = COPPER_RESISTIVITY_OHM_MM2_PER_M
    cross_section: float = 1.0
    material_density: float = COPPER_DENSITY_KG_M3
    length: float = 2.0 * math.pi * 15.0  # m, one great-circle loop

    def __post_init__(self):
        for name in ("resistivity", "cross_section", "material_density", "length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class BudgetCheck:
    name: str
    passed: bool
    detail: str


@dataclass
class BudgetReport:
    """Per-coil electrical budget plus feasibility checks."""

    resistance_per_coil: float
    power_per_coil: List[float]
    mass_per_coil: float
    total_power: float
    total_mass: float
    pressure_floor: float                 # Pa, margin included
    skin_depths: Dict[float, float]       # frequency Hz -> depth m
    slew_time: float                      # s, constant-torque 30 deg-style slew
    final_rate: float                     # rad/s
    rim_speed: float                      # m/s
    kinetic_energy: float                 # J
    avg_mechanical_power: float           # W
    checks: List[BudgetCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def coil_resistance(wire: WireSpec) -> float:
    """R = rho L / s, in ohms."""
    return wire.resistivity * wire.length / wire.cross_section


def ohmic_power(resistance: float, current: float) -> float:
    """P = R i^2, in watts."""
    if resistance < 0:
        raise ValueError("resistance must be nonnegative")
    return resistance * current * current


def wire_mass(wire: WireSpec, coil_count: int) -> float:
    """Total conductor mass in kg; cross_section converts mm^2 -> m^2."""
    if coil_count < 1:
        raise ValueError("coil_count must be >= 1")
    return coil_count * wire.material_density * wire.length * wire.cross_section * 1e-6


def uniform_slew_kinematics(theta_target: float, duration: float,
                            radius: float) -> Tuple[float, float, float]:
    """Constant-acceleration slew from rest: (alpha, omega_final, rim_speed).

    alpha = 2 theta / t^2, omega = alpha t = 2 theta / t, rim = omega R.
    """
    if not duration > 0:
        raise ValueError("duration must be positive")
    alpha = 2.0 * theta_target / (duration * duration)
    omega_final = alpha * duration
    return alpha, omega_final, omega_final * radius


def kinetic_energy_point_mass(mass: float, speed: float) -> float:
    """E = m v^2 / 2, the whole balloon mass riding at the rim."""
    if not mass > 0:
        raise ValueError("mass must be positive")
    return 0.5 * mass * speed * speed


def average_power(energy: float, duration: float) -> float:
    """E / t, in watts."""
    if not duration > 0:
        raise ValueError("duration must be positive")
    return energy / duration


def line_force_per_meter(current: float, field_magnitude: float) -> float:
    """Ampere force per meter of wire: f = i B."""
    return current * field_magnitude


def min_internal_pressure(current: float, field_magnitude: float,
                          radius: float, margin: float = 1.0) -> float:
    """Pressure floor so the membrane reaction dominates the wire force.

    Equating the per-meter Ampere force i B with the hoop reaction
    R p / 2 gives p = 2 i B / R; the margin operationalizes "much less
    than" (default 1 returns the bare balance point).
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    if margin < 1.0:
        raise ValueError("margin must be >= 1")
    return margin * 2.0 * current * field_magnitude / radius


def skin_depth(resistivity_ohm_m: float, frequency: float) -> float:
    """delta = sqrt(rho / (pi f mu0)), in meters."""
    if not frequency > 0:
        raise ValueError("frequency must be positive")
    return math.sqrt(resistivity_ohm_m
                     / (math.pi * frequency * VACUUM_PERMEABILITY))


def budget_report(scenario) -> BudgetReport:
    """Aggregate the budget for a ScenarioConfig and run its checks.

    Checks: per-ring ohmic power within the photovoltaic budget, internal
    pressure at or above the margin-scaled floor, coating at least one
    skin depth at the highest configured frequency.
    """
    from .scenario import ScenarioConfig  # local import to avoid a cycle
    if not isinstance(scenario, ScenarioConfig):
        raise TypeError("budget_report expects a ScenarioConfig")
    radius = scenario.balloon.radius_m
    wire = WireSpec(resistivity=scenario.coils.resistivity_ohm_mm2_per_m,
                    cross_section=scenario.coils.cross_section_mm2,
                    material_density=scenario.coils.material_density_kg_m3,
                    length=2.0 * math.pi * radius)
    resistance = coil_resistance(wire)
    current = scenario.maneuver.current_A
    count = scenario.coils.count
    power_per_coil = [ohmic_power(resistance, current) for _ in range(count)]
    mass_total = wire_mass(wire, count)
    b_mag = scenario.field_magnitude_at_start()
    floor = min_internal_pressure(current, b_mag, radius,
                                  scenario.checks.pressure_margin)
    # resistivity ohm mm^2/m -> ohm m is a 1e-6 factor
    rho_si = wire.resistivity * 1e-6
    freqs = [SPEED_OF_LIGHT / (wl * 1e-2) for wl in scenario.checks.wavelengths_cm]
    depths = {f: skin_depth(rho_si, f) for f in freqs}

    theta = math.radians(scenario.maneuver.target_deg)
    duration = scenario.checks.slew_duration_s
    _, omega_final, rim = uniform_slew_kinematics(theta, duration, radius)
    e_k = kinetic_energy_point_mass(scenario.balloon.mass_kg, rim)
    p_avg = average_power(e_k, duration)

    checks = []
    worst_power = max(power_per_coil) if power_per_coil else 0.0
    checks.append(BudgetCheck(
        name="per_ring_power",
        passed=worst_power <= scenario.checks.pv_watts,
        detail=f"{worst_power:.4g} W per ring vs {scenario.checks.pv_watts:.4g} W available"))
    checks.append(BudgetCheck(
        name="internal_pressure",
        passed=scenario.checks.internal_pressure_pa >= floor,
        detail=f"{scenario.checks.internal_pressure_pa:.4g} Pa vs floor {floor:.4g} Pa"))
    deepest = max(depths.values()) if depths else 0.0
    checks.append(BudgetCheck(
        name="coating_thickness",
        passed=scenario.checks.coating_thickness_m >= deepest,
        detail=(f"{scenario.checks.coating_thickness_m:.4g} m vs deepest skin "
                f"depth {deepest:.4g} m")))

    return BudgetReport(
        resistance_per_coil=resistance,
        power_per_coil=power_per_coil,
        mass_per_coil=mass_total / count,
        total_power=sum(power_per_coil),
        total_mass=mass_total,
        pressure_floor=floor,
        skin_depths=depths,
        slew_time=duration,
        final_rate=omega_final,
        rim_speed=rim,
        kinetic_energy=e_k,
        avg_mechanical_power=p_avg,
        checks=checks,
    )
