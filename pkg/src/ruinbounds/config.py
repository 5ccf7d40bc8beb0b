"""Flat config-file format for the command line tool.

Sections ``[model]``, ``[model2]``, ``[diffusion]``, ``[numeric]``; one
``key = value`` per line; ``#`` starts a comment.  Claim laws are selected
by ``claims = exp | hyperexp | erlang`` with ``rate``, ``rates`` +
``weights`` (comma separated) or ``shape`` + ``rate``.  Floats are dumped
with ``repr`` so a dump/parse round trip is lossless.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .classical import RiskModel
from .distributions import Erlang, Exponential, HyperExponential

__all__ = ["NumericSpec", "ModelConfig", "ConfigError", "loads", "load", "dumps"]

_SECTIONS = ("model", "model2", "diffusion", "numeric")
_MODEL_KEYS = {"lambda", "c", "claims", "rate", "rates", "weights", "shape"}
_DIFFUSION_KEYS = {"d", "d2"}
_NUMERIC_KEYS = {"h", "umax", "seed"}


class ConfigError(ValueError):
    """Malformed config file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class NumericSpec:
    h: float = 2.0**-10
    umax: float | None = None
    seed: int = 1


@dataclass(frozen=True)
class ModelConfig:
    model: RiskModel
    model2: RiskModel | None = None
    D: float | None = None
    D2: float | None = None
    numeric: NumericSpec = field(default_factory=NumericSpec)


def _parse_floats(text):
    return [float(x) for x in text.split(",")]


def _build_claims(keys, line_of):
    kind = keys.get("claims")
    if kind is None:
        raise ConfigError("missing 'claims' key", line_of.get("claims"))
    if kind == "exp":
        if "rate" not in keys:
            raise ConfigError("exp claims need 'rate'", line_of.get("claims"))
        return Exponential(float(keys["rate"]))
    if kind == "hyperexp":
        for need in ("weights", "rates"):
            if need not in keys:
                raise ConfigError(f"hyperexp claims need '{need}'",
                                  line_of.get("claims"))
        weights = _parse_floats(keys["weights"])
        rates = _parse_floats(keys["rates"])
        s = sum(weights)
        if abs(s - 1.0) > 1e-9:
            raise ConfigError(f"weights sum to {s!r}, not 1",
                              line_of.get("weights"))
        if abs(s - 1.0) > 1e-12:
            warnings.warn(f"hyperexp weights sum to {s!r}; renormalizing")
        return HyperExponential(weights, rates)
    if kind == "erlang":
        for need in ("shape", "rate"):
            if need not in keys:
                raise ConfigError(f"erlang claims need '{need}'",
                                  line_of.get("claims"))
        return Erlang(int(keys["shape"]), float(keys["rate"]))
    raise ConfigError(f"unknown claims kind {kind!r} (exp|hyperexp|erlang)",
                      line_of.get("claims"))


def _build_model(keys, line_of):
    for need in ("lambda", "c"):
        if need not in keys:
            raise ConfigError(f"model section needs '{need}'",
                              min(line_of.values()) if line_of else None)
    return RiskModel(lam=float(keys["lambda"]), c=float(keys["c"]),
                     claims=_build_claims(keys, line_of))


def loads(text: str) -> ModelConfig:
    """Parse a config document; raises ConfigError with a line number on
    syntax problems, PreconditionError on model-level violations."""
    sections = {}
    lines_of = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section [{name}]", lineno)
            if name in sections:
                raise ConfigError(f"duplicate section [{name}]", lineno)
            current = name
            sections[name] = {}
            lines_of[name] = {}
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        if current is None:
            raise ConfigError("key outside any section", lineno)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        allowed = (_MODEL_KEYS if current in ("model", "model2")
                   else _DIFFUSION_KEYS if current == "diffusion"
                   else _NUMERIC_KEYS)
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{current}]", lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        sections[current][key] = value
        lines_of[current][key] = lineno

    if "model" not in sections:
        raise ConfigError("missing required section [model]")
    model = _build_model(sections["model"], lines_of["model"])
    model2 = None
    if "model2" in sections:
        model2 = _build_model(sections["model2"], lines_of["model2"])

    D = D2 = None
    if "diffusion" in sections:
        diff = sections["diffusion"]
        if "d" in diff:
            D = float(diff["d"])
        if "d2" in diff:
            D2 = float(diff["d2"])

    numeric = NumericSpec()
    if "numeric" in sections:
        num = sections["numeric"]
        kwargs = {}
        if "h" in num:
            kwargs["h"] = float(num["h"])
        if "umax" in num:
            kwargs["umax"] = float(num["umax"])
        if "seed" in num:
            kwargs["seed"] = int(num["seed"])
        if kwargs.get("h", 1.0) <= 0:
            raise ConfigError("h must be positive", lines_of["numeric"].get("h"))
        numeric = NumericSpec(**kwargs)

    return ModelConfig(model=model, model2=model2, D=D, D2=D2, numeric=numeric)


def load(path) -> ModelConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def _claims_lines(claims):
    if isinstance(claims, Exponential):
        return [f"claims = exp", f"rate = {claims.beta!r}"]
    if isinstance(claims, HyperExponential):
        return [f"claims = hyperexp",
                "weights = " + ", ".join(repr(w) for w in claims.weights),
                "rates = " + ", ".join(repr(r) for r in claims.rates)]
    if isinstance(claims, Erlang):
        return [f"claims = erlang", f"shape = {claims.shape}",
                f"rate = {claims.beta!r}"]
    raise TypeError(f"cannot serialize claims of type {type(claims).__name__}")


def dumps(cfg: ModelConfig) -> str:
    """Write a config back out; parsing the result reproduces cfg exactly."""
    out = ["[model]", f"lambda = {cfg.model.lam!r}", f"c = {cfg.model.c!r}"]
    out += _claims_lines(cfg.model.claims)
    if cfg.model2 is not None:
        out += ["", "[model2]", f"lambda = {cfg.model2.lam!r}",
                f"c = {cfg.model2.c!r}"]
        out += _claims_lines(cfg.model2.claims)
    if cfg.D is not None or cfg.D2 is not None:
        out += ["", "[diffusion]"]
        if cfg.D is not None:
            out.append(f"D = {cfg.D!r}")
        if cfg.D2 is not None:
            out.append(f"D2 = {cfg.D2!r}")
    num = cfg.numeric
    out += ["", "[numeric]", f"h = {num.h!r}"]
    if num.umax is not None:
        out.append(f"umax = {num.umax!r}")
    out.append(f"seed = {num.seed}")
    return "\n".join(out) + "\n"
