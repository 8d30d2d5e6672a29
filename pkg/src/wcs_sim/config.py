"""TOML experiment-configuration loading with fail-fast validation.

The file has five sections ([plant], [cost], [protocol], [trigger], [sim]);
every key is optional and falls back to the defaults baked into
:class:`~wcs_sim.sim.ExperimentConfig`.  Unknown sections or keys are hard
errors, reported with the line they appear on.
"""

from __future__ import annotations

from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .net import ProtocolConfig
from .plant import CartPoleParams, Disturbance
from .sim import ConfigError, ExperimentConfig, validate_config

_BOOL = "bool"
_INT = "int"
_FLOAT = "float"
_STR = "str"
_FLOAT_LIST = "float list"

SCHEMA: dict[str, dict[str, str]] = {
    "plant": {
        "cart_mass": _FLOAT,
        "pole_mass": _FLOAT,
        "pole_length": _FLOAT,
        "gravity": _FLOAT,
        "cart_friction": _FLOAT,
        "noise_velocity_density": _FLOAT,
        "disturbance": _STR,
        "disturbance_amplitude": _FLOAT,
        "disturbance_period": _FLOAT,
        "disturbance_agent": _INT,
    },
    "cost": {
        "q_local_diag": _FLOAT_LIST,
        "q_sync_diag": _FLOAT_LIST,
        "r_local": _FLOAT,
    },
    "protocol": {
        "data_slots": _INT,
        "slot_len": _FLOAT,
        "p_rx": _FLOAT,
        "num_nodes": _INT,
    },
    "trigger": {
        "delta": _FLOAT,
        "m_max": _INT,
    },
    "sim": {
        "agents": _INT,
        "period": _FLOAT,
        "dt_local": _FLOAT,
        "duration": _FLOAT,
        "seed": _INT,
        "warmup": _FLOAT,
        "policy": _STR,
        "include_schedule_slot": _BOOL,
    },
}


def _find_line(text: str, section: str, key: str | None) -> int:
    """Best-effort line anchor for a section or key inside a section."""
    current = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if key is None and current == section:
                return lineno
        elif key is not None and current == section:
            if stripped.split("=", 1)[0].strip() == key:
                return lineno
    return 1


def _coerce(value, expected: str, where: str):
    if expected == _BOOL:
        if isinstance(value, bool):
            return value
    elif expected == _INT:
        if isinstance(value, bool):
            pass
        elif isinstance(value, int):
            return value
    elif expected == _FLOAT:
        if isinstance(value, bool):
            pass
        elif isinstance(value, (int, float)):
            return float(value)
    elif expected == _STR:
        if isinstance(value, str):
            return value
    elif expected == _FLOAT_LIST:
        if isinstance(value, list) and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return tuple(float(v) for v in value)
    raise ConfigError(f"{where}: expected {expected}, got {value!r}")


def _parse_sections(path: Path) -> tuple[dict, str]:
    text = path.read_text(encoding="utf-8")
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}:1: not valid TOML: {exc}") from exc
    for section, content in raw.items():
        if section not in SCHEMA:
            line = _find_line(text, section, None)
            raise ConfigError(f"{path}:{line}: unknown section [{section}]")
        if not isinstance(content, dict):
            line = _find_line(text, section, None)
            raise ConfigError(f"{path}:{line}: [{section}] must be a table")
        for key in content:
            if key not in SCHEMA[section]:
                line = _find_line(text, section, key)
                raise ConfigError(f"{path}:{line}: unknown key '{key}' in [{section}]")
    return raw, text


def load_config(path: str | Path, seed: int | None = None) -> ExperimentConfig:
    """Parse, validate, and resolve a configuration file.

    ``seed`` overrides the file's [sim].seed when given.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{path}: no such config file")
    raw, text = _parse_sections(path)

    values: dict[str, dict] = {}
    for section, keys in SCHEMA.items():
        values[section] = {}
        for key, expected in keys.items():
            if section in raw and key in raw[section]:
                where = f"{path}:{_find_line(text, section, key)}: [{section}].{key}"
                values[section][key] = _coerce(raw[section][key], expected, where)

    plant = values["plant"]
    cost = values["cost"]
    proto = values["protocol"]
    trig = values["trigger"]
    sim = values["sim"]

    defaults = ExperimentConfig()
    n_agents = sim.get("agents", defaults.agents)
    num_nodes = proto.get("num_nodes", defaults.protocol.num_nodes)
    try:
        protocol = ProtocolConfig(
            period=sim.get("period", defaults.period),
            data_slots=proto.get("data_slots", defaults.protocol.data_slots),
            slot_len=proto.get("slot_len", defaults.protocol.slot_len),
            p_rx=proto.get("p_rx", defaults.protocol.p_rx),
            num_nodes=num_nodes,
            manager=n_agents,
            other_nodes=tuple(range(n_agents + 1, num_nodes)),
        )
    except ValueError as exc:
        line = _find_line(text, "protocol", None)
        raise ConfigError(f"{path}:{line}: {exc}") from exc
    params = CartPoleParams(
        cart_mass=plant.get("cart_mass", defaults.params.cart_mass),
        pole_mass=plant.get("pole_mass", defaults.params.pole_mass),
        pole_length=plant.get("pole_length", defaults.params.pole_length),
        gravity=plant.get("gravity", defaults.params.gravity),
        cart_friction=plant.get("cart_friction", defaults.params.cart_friction),
    )
    try:
        disturbance = Disturbance(
            kind=plant.get("disturbance", defaults.disturbance.kind),
            amplitude=plant.get("disturbance_amplitude", defaults.disturbance.amplitude),
            period=plant.get("disturbance_period", defaults.disturbance.period),
            target_agent=plant.get("disturbance_agent", defaults.disturbance.target_agent),
        )
    except ValueError as exc:
        line = _find_line(text, "plant", "disturbance")
        raise ConfigError(f"{path}:{line}: {exc}") from exc
    cfg = ExperimentConfig(
        agents=n_agents,
        dt_local=sim.get("dt_local", defaults.dt_local),
        duration=sim.get("duration", defaults.duration),
        delta=trig.get("delta", defaults.delta),
        seed=seed if seed is not None else sim.get("seed", defaults.seed),
        m_max=trig.get("m_max", defaults.m_max),
        warmup=sim.get("warmup", defaults.warmup),
        policy=sim.get("policy", defaults.policy),
        protocol=protocol,
        params=params,
        noise_velocity_density=plant.get("noise_velocity_density",
                                         defaults.noise_velocity_density),
        q_local_diag=cost.get("q_local_diag", defaults.q_local_diag),
        q_sync_diag=cost.get("q_sync_diag", defaults.q_sync_diag),
        r_local=cost.get("r_local", defaults.r_local),
        disturbance=disturbance,
        include_schedule_slot=sim.get("include_schedule_slot",
                                      defaults.include_schedule_slot),
    )
    try:
        validate_config(cfg)
    except ConfigError as exc:
        raise ConfigError(f"{path}:1: {exc}") from exc
    return cfg
