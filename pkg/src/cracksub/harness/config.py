"""Scenario configuration: TOML files with dotted sections (model.*, field.*,
crack.*, tip.*, contours.*, ...) layered over a scenario's defaults."""
import copy
import hashlib
import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..errors import ConfigError

TOP_LEVEL = ("scenario", "seed", "outputs")


def load_config(path):
    """Parse a TOML config file into a plain dict."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"{path}: {exc}") from exc


def parse_config(text):
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<text>", str(exc)) from exc


def _coerce(key, default, value):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(key, f"expected a list, got {value!r}")
        if default and all(isinstance(d, float) for d in default):
            return [_coerce(f"{key}[{i}]", 0.0, v) for i, v in enumerate(value)]
        if default and all(isinstance(d, str) for d in default):
            return [_coerce(f"{key}[{i}]", "", v) for i, v in enumerate(value)]
        return list(value)
    return value


def merge(defaults, overrides, prefix=""):
    """Deep-merge ``overrides`` into a copy of ``defaults``; unknown keys are errors."""
    out = copy.deepcopy(defaults)
    for k, v in overrides.items():
        key = f"{prefix}{k}"
        if k not in out:
            raise ConfigError(key, "unknown key")
        if isinstance(out[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(key, "expected a section")
            out[k] = merge(out[k], v, key + ".")
        else:
            out[k] = _coerce(key, out[k], v)
    return out


def resolve(config, catalog):
    """(scenario, params) for a config dict naming a catalog scenario."""
    if "scenario" not in config:
        raise ConfigError("scenario", "missing scenario name")
    name = config["scenario"]
    if name not in catalog:
        raise ConfigError("scenario", f"unknown scenario {name!r}; known: {', '.join(sorted(catalog))}")
    scenario = catalog[name]
    overrides = {k: v for k, v in config.items() if k != "scenario"}
    params = merge(scenario.defaults, overrides)
    for o in params["outputs"]:
        if o not in scenario.outputs:
            raise ConfigError("outputs", f"unknown output {o!r} for {name}; known: {', '.join(scenario.outputs)}")
    scenario.validate(params)
    return scenario, params


def config_hash(name, params):
    blob = json.dumps({"scenario": name, "params": params}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
