"""
Experiment configuration: parsing, validation and serialization

Experiment files are JSON documents checked against EXPERIMENT_SCHEMA. Unknown
keys are rejected, and every error names the offending field and, when the
source text is known, its line.
"""

import json
from dataclasses import asdict, dataclass, field, fields, replace

import jsonschema
from jsonschema.exceptions import best_match

from core.channel import DISTRIBUTIONS
from core.codecs import codec_from_dict
from core.eavesdropper import ATTACKS
from core.errors import ConfigError, LatticeWireError
from core.schemes import NORM_MODES

SCHEMES = ("inversion", "svd")
NOISE_REFERENCES = ("snr", "dmin")

_INT_LIST = {"type": "array", "items": {"type": "integer"}}

EXPERIMENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["scheme", "codec", "n", "snr_grid", "trials_per_point", "seed"],
    "additionalProperties": False,
    "properties": {
        "scheme": {"enum": list(SCHEMES)},
        "codec": {"$ref": "#/$defs/codec"},
        "n": {"type": "integer", "minimum": 1},
        "snr_grid": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "exclusiveMinimum": 0},
        },
        "trials_per_point": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "channel_dist": {"enum": list(DISTRIBUTIONS)},
        "threshold_t": {"type": "number", "minimum": 0},
        "norm_mode": {"enum": list(NORM_MODES)},
        "attacks": {"type": "array", "uniqueItems": True, "items": {"enum": list(ATTACKS)}},
        "power": {"type": "number", "exclusiveMinimum": 0},
        "noise_reference": {"enum": list(NOISE_REFERENCES)},
        "sigma_ratio": {"type": "number", "exclusiveMinimum": 0},
        "eve_knows_c": {"type": "boolean"},
        "g_equals_h": {"type": "boolean"},
        "fixed_channel": {"type": "boolean"},
        "acceptance": {"$ref": "#/$defs/acceptance"},
    },
    "$defs": {
        "codec": {
            "type": "object",
            "properties": {"kind": {"enum": ["blocktri", "plain"]}},
            "allOf": [
                {
                    "if": {"properties": {"kind": {"const": "plain"}}, "required": ["kind"]},
                    "then": {"$ref": "#/$defs/plain_codec"},
                },
                {
                    # kind may be left out for the block-triangular codec
                    "if": {"properties": {"kind": {"const": "blocktri"}}},
                    "then": {"$ref": "#/$defs/blocktri_codec"},
                },
            ],
        },
        "blocktri_codec": {
            "type": "object",
            "required": ["p", "l", "b", "r"],
            "additionalProperties": False,
            "properties": {
                "kind": {"const": "blocktri"},
                "p": {"type": "integer", "minimum": 2},
                "l": {"type": "integer", "minimum": 1},
                "b": {"type": "integer", "minimum": 2},
                "r": {"type": "integer", "minimum": 1},
                "z": {"type": "integer", "minimum": 0},
                "k": _INT_LIST,
                "a": {
                    "type": "object",
                    "propertyNames": {"pattern": "^[0-9]+,[0-9]+$"},
                    "additionalProperties": _INT_LIST,
                },
                "seed": {"type": "integer", "minimum": 0},
                "window": {"type": "integer", "minimum": 1},
            },
        },
        "plain_codec": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"const": "plain"},
                "basis": {
                    "anyOf": [
                        {"enum": ["identity", "hexagonal"]},
                        {"type": "array", "minItems": 1,
                         "items": {"type": "array", "items": {"type": "number"}}},
                    ],
                },
                "n": {"type": "integer", "minimum": 1},
                "q": {"type": "integer", "minimum": 2},
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "decoder": {"enum": ["babai", "exact"]},
            },
        },
        "acceptance": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "min_ratio": {"type": "number", "exclusiveMinimum": 0},
                "proxy_fraction": {"type": "number", "minimum": 0, "maximum": 1},
                "unitarity_min": {"type": "number", "minimum": 0},
                "offdiag_min": {"type": "number", "minimum": 0},
                "max_bob_ser": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
                "points": {
                    "type": ["array", "null"],
                    "minItems": 1,
                    "items": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(EXPERIMENT_SCHEMA)


@dataclass(frozen=True)
class AcceptanceThresholds:
    min_ratio: float = 50.0
    proxy_fraction: float = 0.95
    unitarity_min: float = 0.1
    offdiag_min: float = 0.05
    max_bob_ser: float = None
    points: tuple = None


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str
    codec: dict
    n: int
    snr_grid: tuple
    trials_per_point: int
    seed: int
    channel_dist: str = "gaussian"
    threshold_t: float = 0.0
    norm_mode: str = "ensemble_average"
    attacks: tuple = ("whitened", "babai")
    power: float = 1.0
    noise_reference: str = "snr"
    sigma_ratio: float = 1.0
    eve_knows_c: bool = True
    g_equals_h: bool = False
    fixed_channel: bool = False
    acceptance: AcceptanceThresholds = field(default_factory=AcceptanceThresholds)

    def to_dict(self):
        data = asdict(self)
        data["snr_grid"] = list(self.snr_grid)
        data["attacks"] = list(self.attacks)
        if self.acceptance.points is not None:
            data["acceptance"]["points"] = list(self.acceptance.points)
        return data

    @classmethod
    def from_dict(cls, data, text=None):
        return _parse(data, text)

    def with_overrides(self, seed=None, trials=None):
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if trials is not None:
            changes["trials_per_point"] = trials
        if not changes:
            return self
        _validate({**self.to_dict(), **changes}, None)
        return replace(self, **changes)

    def build_codec(self):
        return codec_from_dict(self.codec)


def _line_of(text, path):
    """Line number of the last key of ``path`` in ``text``, if it can be found"""
    if not text or not path:
        return None
    position = 0
    for key in path.split("."):
        found = text.find(f'"{key}"', position)
        if found < 0:
            return None
        position = found
    return text.count("\n", 0, position) + 1


def _field_of(error):
    """Dotted key path of a schema error; list indices are dropped"""
    keys = [str(part) for part in error.absolute_path if isinstance(part, str)]
    if error.validator == "additionalProperties":
        allowed = error.schema.get("properties", {})
        keys += sorted(key for key in error.instance if key not in allowed)[:1]
    elif error.validator == "required":
        keys += [key for key in error.validator_value if key not in error.instance][:1]
    return ".".join(keys) or None


def _validate(data, text):
    error = best_match(_VALIDATOR.iter_errors(data))
    if error is not None:
        path = _field_of(error)
        raise ConfigError(error.message, field=path, line=_line_of(text, path))


def _parse(data, text):
    _validate(data, text)

    codec = {"kind": "blocktri", **data["codec"]}
    try:
        codec_dim = codec_from_dict(codec).dim
    except LatticeWireError as e:
        raise ConfigError(str(e), field="codec", line=_line_of(text, "codec")) from e
    if codec_dim != data["n"]:
        raise ConfigError(f"codec dimension {codec_dim} does not match n={data['n']}",
                          field="n", line=_line_of(text, "n"))

    known = {f.name for f in fields(ExperimentConfig)}
    values = {key: value for key, value in data.items() if key in known}
    values["codec"] = codec
    values["snr_grid"] = tuple(float(v) for v in data["snr_grid"])
    values["attacks"] = tuple(data.get("attacks", ExperimentConfig.attacks))
    for key in ("threshold_t", "power", "sigma_ratio"):
        if key in values:
            values[key] = float(values[key])
    values["acceptance"] = _acceptance(data.get("acceptance", {}))
    return ExperimentConfig(**values)


def _acceptance(section):
    values = {key: float(value) for key, value in section.items()
              if key != "points" and value is not None}
    if section.get("points") is not None:
        values["points"] = tuple(float(v) for v in section["points"])
    return AcceptanceThresholds(**values)


def _reject_constant(name):
    raise ConfigError(f"non-finite number {name} is not allowed")


def loads_experiment(text):
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON: {e.msg}", line=e.lineno) from e
    return ExperimentConfig.from_dict(data, text)


def load_experiment(path):
    with open(path, "r", encoding="utf-8") as f:
        return loads_experiment(f.read())


def dumps_experiment(config):
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"
