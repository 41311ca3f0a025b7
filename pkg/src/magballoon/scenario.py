"""Declarative scenario files and telemetry serialization.

Format: flat sectioned key-value text (`[section]` headers, `key = value`
lines, `#` comments). SI units throughout; keys ending in `_deg` are
degrees. Unknown sections or keys are rejected. parse -> serialize ->
parse is lossless.
"""

import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from typing import List, Optional, Tuple


from . import geomag, orbit
from .attitude import BalloonBody, CoilSet, InertiaModel
from .errors import EmptyTrajectory, ParseError, UnknownKey, ValidationError

REQUIRED = object()

# Per-section key registry: name -> (kind, default). kind is one of
# "float", "int", "bool", "vec3", "floatlist", or a tuple of allowed
# string values.
_SCHEMA = {
    "balloon": {
        "mass_kg": ("float", 50.0),
        "radius_m": ("float", 15.0),
        "inertia_model": (("ring_axis", "ring_diameter", "spherical_shell"),
                          "ring_axis"),
    },
    "coils": {
        "count": ("int", 3),
        "cross_section_mm2": ("float", 1.0),
        "resistivity_ohm_mm2_per_m": ("float", 0.0175),
        "material_density_kg_m3": ("float", 8960.0),
        "turns": ("int", 1),
    },
    "field": {
        "model": (("uniform", "dipole"), "uniform"),
        "magnitude_T": ("float", 1.375e-5),
        "direction": ("vec3", (0.0, 0.0, 1.0)),
        "equatorial_field_T": ("float", 3.12e-5),
        "reference_radius_m": ("float", 6.371e6),
        "dipole_axis": ("vec3", (0.0, 0.0, 1.0)),
    },
    "orbit": {
        "model": (("none", "circular", "elliptical"), "none"),
        "altitude_km": ("float", 2000.0),
        "perigee_altitude_km": ("float", 5000.0),
        "apogee_altitude_km": ("float", 40000.0),
        "mu_m3_s2": ("float", orbit.MU_EARTH),
        "phase_deg": ("float", 0.0),
        "plane_normal": ("vec3", (0.0, 0.0, 1.0)),
        "raan_deg": ("float", 0.0),
        "inclination_deg": ("float", 0.0),
        "arg_perigee_deg": ("float", 0.0),
        "epoch_mean_anomaly_deg": ("float", 0.0),
    },
    "maneuver": {
        "mode": (("scalar", "3d"), "scalar"),
        "type": (("constant", "bang_bang"), REQUIRED),
        "target_deg": ("float", 30.0),
        "current_A": ("float", 1.0),
        "initial_angle_deg": ("float", 90.0),
        "small_angle": ("bool", False),
        "commanded_axis": ("vec3", (1.0, 0.0, 0.0)),
    },
    "sim": {
        "dt_s": ("float", 0.1),
        "max_time_s": ("float", 1e6),
        "stop_tolerance_rad": ("float", 1e-6),
    },
    "checks": {
        "pv_watts": ("float", 5.0),
        "coating_thickness_m": ("float", 5e-6),
        "internal_pressure_pa": ("float", 1e-4),
        "pressure_margin": ("float", 10.0),
        "wavelengths_cm": ("floatlist", (1.35, 6.0, 18.0, 92.0)),
        "slew_duration_s": ("float", 600.0),
    },
}


@dataclass(frozen=True)
class BalloonCfg:
    mass_kg: float = 50.0
    radius_m: float = 15.0
    inertia_model: str = "ring_axis"


@dataclass(frozen=True)
class CoilsCfg:
    count: int = 3
    cross_section_mm2: float = 1.0
    resistivity_ohm_mm2_per_m: float = 0.0175
    material_density_kg_m3: float = 8960.0
    turns: int = 1


@dataclass(frozen=True)
class FieldCfg:
    model: str = "uniform"
    magnitude_T: float = 1.375e-5
    direction: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    equatorial_field_T: float = 3.12e-5
    reference_radius_m: float = 6.371e6
    dipole_axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class OrbitCfg:
    model: str = "none"
    altitude_km: float = 2000.0
    perigee_altitude_km: float = 5000.0
    apogee_altitude_km: float = 40000.0
    mu_m3_s2: float = orbit.MU_EARTH
    phase_deg: float = 0.0
    plane_normal: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    raan_deg: float = 0.0
    inclination_deg: float = 0.0
    arg_perigee_deg: float = 0.0
    epoch_mean_anomaly_deg: float = 0.0


@dataclass(frozen=True)
class ManeuverCfg:
    type: str
    mode: str = "scalar"
    target_deg: float = 30.0
    current_A: float = 1.0
    initial_angle_deg: float = 90.0
    small_angle: bool = False
    commanded_axis: Tuple[float, float, float] = (1.0, 0.0, 0.0)


@dataclass(frozen=True)
class SimCfg:
    dt_s: float = 0.1
    max_time_s: float = 1e6
    stop_tolerance_rad: float = 1e-6


@dataclass(frozen=True)
class ChecksCfg:
    pv_watts: float = 5.0
    coating_thickness_m: float = 5e-6
    internal_pressure_pa: float = 1e-4
    pressure_margin: float = 10.0
    wavelengths_cm: Tuple[float, ...] = (1.35, 6.0, 18.0, 92.0)
    slew_duration_s: float = 600.0


_SECTION_TYPES = {
    "balloon": BalloonCfg,
    "coils": CoilsCfg,
    "field": FieldCfg,
    "orbit": OrbitCfg,
    "maneuver": ManeuverCfg,
    "sim": SimCfg,
    "checks": ChecksCfg,
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete declarative description of one simulation or budget run."""

    balloon: BalloonCfg = field(default_factory=BalloonCfg)
    coils: CoilsCfg = field(default_factory=CoilsCfg)
    field_cfg: FieldCfg = field(default_factory=FieldCfg)
    orbit_cfg: OrbitCfg = field(default_factory=OrbitCfg)
    maneuver: ManeuverCfg = field(default_factory=lambda: ManeuverCfg(type="constant"))
    sim: SimCfg = field(default_factory=SimCfg)
    checks: ChecksCfg = field(default_factory=ChecksCfg)

    # --- derived model objects -------------------------------------------

    def body(self) -> BalloonBody:
        return BalloonBody(mass=self.balloon.mass_kg,
                           radius=self.balloon.radius_m,
                           inertia_model=InertiaModel(self.balloon.inertia_model))

    def coil_set(self) -> CoilSet:
        if self.coils.count == 1:
            return CoilSet.single(self.balloon.radius_m)
        return CoilSet.orthogonal_triad(self.balloon.radius_m)

    def field_model(self):
        f = self.field_cfg
        if f.model == "uniform":
            return geomag.UniformFieldSpec(magnitude=f.magnitude_T,
                                           direction=f.direction)
        return geomag.DipoleFieldSpec(
            equatorial_surface_field=f.equatorial_field_T,
            reference_radius=f.reference_radius_m,
            dipole_axis=f.dipole_axis)

    def orbit_spec(self):
        o = self.orbit_cfg
        if o.model == "none":
            return None
        if o.model == "circular":
            return orbit.CircularOrbitSpec(
                altitude=o.altitude_km * 1e3,
                reference_radius=self.field_cfg.reference_radius_m,
                gravitational_parameter=o.mu_m3_s2,
                plane_normal=o.plane_normal,
                phase=math.radians(o.phase_deg))
        re = self.field_cfg.reference_radius_m
        return orbit.EllipticalOrbitSpec(
            perigee_radius=re + o.perigee_altitude_km * 1e3,
            apogee_radius=re + o.apogee_altitude_km * 1e3,
            gravitational_parameter=o.mu_m3_s2,
            raan=math.radians(o.raan_deg),
            inclination=math.radians(o.inclination_deg),
            arg_perigee=math.radians(o.arg_perigee_deg),
            epoch_mean_anomaly=math.radians(o.epoch_mean_anomaly_deg))

    def field_magnitude_at_start(self) -> float:
        model = self.field_model()
        if isinstance(model, geomag.UniformFieldSpec):
            return model.magnitude
        spec = self.orbit_spec()
        if spec is None:
            raise ValidationError(
                "field.model = dipole requires an orbit to place the balloon")
        return geomag.field_at(model, orbit.position_at(spec, 0.0)).magnitude

    def validate(self) -> "ScenarioConfig":
        b = self.balloon
        if not (b.mass_kg > 0 and b.radius_m > 0):
            raise ValidationError("balloon mass and radius must be positive")
        if not 1 <= self.coils.count <= 3:
            raise ValidationError("coils.count must be 1, 2, or 3")
        m = self.maneuver
        if m.mode == "3d" and self.coils.count == 2:
            raise ValidationError("maneuver.mode = 3d needs 1 or 3 coils")
        if m.target_deg < 0:
            raise ValidationError("maneuver.target_deg must be nonnegative")
        if self.sim.dt_s <= 0 or self.sim.max_time_s <= self.sim.dt_s:
            raise ValidationError("sim.dt_s and sim.max_time_s are inconsistent")
        if self.field_cfg.model == "dipole" and self.orbit_cfg.model == "none":
            raise ValidationError("field.model = dipole requires orbit.model != none")
        return self


# --- parsing --------------------------------------------------------------


def _parse_value(kind, raw: str, where: str):
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "vec3":
            parts = tuple(float(p) for p in raw.split())
            if len(parts) != 3:
                raise ValueError("expected three components")
            return parts
        if kind == "floatlist":
            return tuple(float(p) for p in raw.split())
        if isinstance(kind, tuple):
            if raw not in kind:
                raise ValueError(f"must be one of {kind}")
            return raw
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    raise AssertionError(f"unhandled kind {kind}")


def _raw_sections(text: str):
    """Split scenario text into {section: {key: raw value}} with line checks."""
    sections = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno)
            name = stripped[1:-1].strip()
            if name not in _SCHEMA:
                raise ValidationError(f"unknown section [{name}]")
            current = sections.setdefault(name, {})
            continue
        if "=" not in stripped:
            raise ParseError(f"expected 'key = value', got {stripped!r}", lineno)
        if current is None:
            raise ParseError("key-value line before any [section]", lineno)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        section_name = next(n for n, s in sections.items() if s is current)
        if key not in _SCHEMA[section_name]:
            raise ValidationError(f"unknown key {section_name}.{key}")
        if key in current:
            raise ParseError(f"duplicate key {key}", lineno)
        current[key] = raw
    return sections


def _build_config(raw: dict) -> ScenarioConfig:
    built = {}
    for section, schema in _SCHEMA.items():
        kwargs = {}
        for key, (kind, default) in schema.items():
            if key in raw.get(section, {}):
                kwargs[key] = _parse_value(kind, raw[section][key],
                                           f"{section}.{key}")
            elif default is REQUIRED:
                raise ValidationError(f"{section}.{key}")
            else:
                kwargs[key] = default
        built[section] = _SECTION_TYPES[section](**kwargs)
    return ScenarioConfig(balloon=built["balloon"], coils=built["coils"],
                          field_cfg=built["field"], orbit_cfg=built["orbit"],
                          maneuver=built["maneuver"], sim=built["sim"],
                          checks=built["checks"]).validate()


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and validate scenario text, applying defaults."""
    return _build_config(_raw_sections(text))


def apply_overrides(config: ScenarioConfig, overrides) -> ScenarioConfig:
    """Apply `section.key=value` override strings on top of a config."""
    sections = {name: dict() for name in _SCHEMA}
    for item in overrides:
        if "=" not in item:
            raise UnknownKey(f"override {item!r} is not key=value")
        dotted, raw = item.split("=", 1)
        dotted = dotted.strip()
        if "." not in dotted:
            raise UnknownKey(f"override key {dotted!r} must be section.key")
        section, key = dotted.split(".", 1)
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise UnknownKey(f"unknown key {dotted}")
        sections[section][key] = raw.strip()
    new = {}
    for section, updates in sections.items():
        cfg = getattr(config, _CONFIG_FIELD[section])
        if updates:
            parsed = {k: _parse_value(_SCHEMA[section][k][0], v, f"{section}.{k}")
                      for k, v in updates.items()}
            cfg = replace(cfg, **parsed)
        new[_CONFIG_FIELD[section]] = cfg
    return ScenarioConfig(**new).validate()


_CONFIG_FIELD = {
    "balloon": "balloon", "coils": "coils", "field": "field_cfg",
    "orbit": "orbit_cfg", "maneuver": "maneuver", "sim": "sim",
    "checks": "checks",
}


def _format_value(kind, value) -> str:
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("vec3", "floatlist"):
        return " ".join(repr(float(v)) for v in value)
    if kind == "float":
        return repr(float(value))
    return str(value)


def serialize_scenario(config: ScenarioConfig) -> str:
    """Render a config back to scenario text (round-trips losslessly)."""
    lines = []
    for section, schema in _SCHEMA.items():
        lines.append(f"[{section}]")
        cfg = getattr(config, _CONFIG_FIELD[section])
        for key, (kind, _default) in schema.items():
            lines.append(f"{key} = {_format_value(kind, getattr(cfg, key))}")
        lines.append("")
    return "\n".join(lines)


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def builtin_scenario_text(name: str = "paper_baseline") -> str:
    """Text of a bundled scenario file."""
    return (resources.files("magballoon") / "data" / f"{name}.scn").read_text()


def builtin_scenario(name: str = "paper_baseline") -> ScenarioConfig:
    return parse_scenario(builtin_scenario_text(name))


# --- telemetry ------------------------------------------------------------

CSV_HEADER = ("t_s,theta_rad,omega_rad_s,torque_Nm,i1_A,i2_A,i3_A,"
              "Bx_T,By_T,Bz_T,ohmic_W,kinetic_J,qw,qx,qy,qz")


@dataclass(frozen=True)
class TimeSeriesRecord:
    """One telemetry row; quaternion is None in scalar mode."""

    t: float
    theta: float
    omega: float
    torque: float
    currents: Tuple[float, float, float]
    B: Tuple[float, float, float]
    ohmic_power: float
    kinetic_energy: float
    quaternion: Optional[Tuple[float, float, float, float]] = None


def _num(x: float) -> str:
    # repr of a float is the shortest decimal that round-trips; it is
    # locale-independent and deterministic.
    return repr(float(x))


def write_timeseries(records: List[TimeSeriesRecord]) -> str:
    """Render records as CSV text with the fixed header and LF endings."""
    if not records:
        raise EmptyTrajectory("no records to write")
    lines = [CSV_HEADER]
    for r in records:
        cells = [_num(r.t), _num(r.theta), _num(r.omega), _num(r.torque)]
        cells += [_num(c) for c in r.currents]
        cells += [_num(b) for b in r.B]
        cells += [_num(r.ohmic_power), _num(r.kinetic_energy)]
        if r.quaternion is None:
            cells += ["", "", "", ""]
        else:
            cells += [_num(q) for q in r.quaternion]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
