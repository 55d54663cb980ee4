"""Experiment configuration: a dataclass plus an INI reader and writer."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields, replace

from ..errors import ContractError
from ..exponents import exponent, exponent_str
from ..field import DEFAULT_GRID_CAP

EXPERIMENTS = ("verify", "scan", "witness", "energy", "report")
FORMATS = ("csv", "json", "markdown")
VERIFY_SUITES = (
    "dsigma_explicit",
    "plancherel",
    "inversion",
    "convolution",
    "duality",
    "slice",
    "bounds",
    "decomposition",
    "subspace",
)

DEFAULT_FORMAT = {"verify": "json", "scan": "csv", "witness": "json", "energy": "json", "report": "markdown"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    dims: tuple[int, ...] = ()
    qs: tuple[int, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()
    sizes: tuple[int, ...] = ()
    suites: tuple[str, ...] = ()
    slice_rs: tuple[str, ...] = ("2", "4")
    seed: int = 0
    samples: int = 20
    restarts: int = 4
    trials: int = 32
    max_iter: int = 200
    tol: float = 1e-10
    depth: int = 40
    energy_constant: float = 8.0
    grid_cap: int = DEFAULT_GRID_CAP
    out: str = ""
    format: str = ""

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ContractError(f"unknown experiment {self.experiment!r}")
        if self.format and self.format not in FORMATS:
            raise ContractError(f"unknown format {self.format!r}")
        bad = [s for s in self.suites if s not in VERIFY_SUITES]
        if bad:
            raise ContractError(f"unknown verify suites {bad}")
        for p, r in self.pairs:
            exponent(p), exponent(r)
        if self.seed < 0 or self.seed >= 2**64:
            raise ContractError("seed must be an unsigned 64-bit integer")

    @property
    def output_format(self) -> str:
        return self.format or DEFAULT_FORMAT[self.experiment]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def cells(self) -> list[tuple[int, int]]:
        return [(d, q) for d in self.dims for q in self.qs]

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = [list(x) for x in v] if f.name == "pairs" else (list(v) if isinstance(v, tuple) else v)
        return out


def default_config(experiment: str) -> ExperimentConfig:
    if experiment == "verify":
        return ExperimentConfig("verify", dims=(2, 3, 4), qs=(3, 5, 7), suites=VERIFY_SUITES)
    if experiment == "scan":
        return ExperimentConfig("scan", dims=(2,), qs=(3, 5, 7, 11, 13), pairs=(("2", "4"), ("2", "3"), ("2", "2")))
    if experiment == "witness":
        return ExperimentConfig("witness", dims=(5,), qs=(3, 7, 11), pairs=(("5/2", "2"), ("5/2", "4")))
    if experiment == "energy":
        return ExperimentConfig("energy", dims=(4,), qs=(3, 5), sizes=(3, 9, 27))
    if experiment == "report":
        return ExperimentConfig("report", dims=(2, 3, 4, 5, 6, 7))
    raise ContractError(f"unknown experiment {experiment!r}")


# -- INI text ------------------------------------------------------------------------

_LIST_INT = {"dims", "qs", "sizes"}
_LIST_STR = {"suites", "slice_rs"}
_INT = {"seed", "samples", "restarts", "trials", "max_iter", "depth", "grid_cap"}
_FLOAT = {"tol", "energy_constant"}


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.replace("\n", ",").split(",") if t.strip()]


def _parse_value(key: str, text: str):
    try:
        if key in _LIST_INT:
            return tuple(int(t) for t in _split(text))
        if key in _LIST_STR:
            return tuple(_split(text))
        if key == "pairs":
            out = []
            for item in _split(text):
                p, _, r = item.partition(":")
                if not r:
                    raise ValueError(f"pair {item!r} is not of the form p:r")
                out.append((exponent_str(exponent(p)), exponent_str(exponent(r))))
            return tuple(out)
        if key in _INT:
            return int(text)
        if key in _FLOAT:
            return float(text)
    except ValueError as exc:
        raise ContractError(f"bad value for {key}: {exc}") from None
    return text.strip()


def _emit_value(key: str, value) -> str:
    if key == "pairs":
        return ", ".join(f"{p}:{r}" for p, r in value)
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Read one experiment section.  Keys missing from the section take the experiment defaults."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ContractError(f"malformed config: {exc}") from None
    sections = parser.sections()
    if experiment is None:
        if len(sections) != 1:
            raise ContractError("config has several sections; name the experiment")
        experiment = sections[0]
    if experiment not in parser:
        raise ContractError(f"config has no [{experiment}] section")
    base = default_config(experiment)
    known = {f.name for f in fields(ExperimentConfig)} - {"experiment"}
    kw = {}
    for key, raw in parser[experiment].items():
        if key not in known:
            raise ContractError(f"unknown config key {key!r}")
        kw[key] = _parse_value(key, raw)
    return replace(base, **kw)


def emit_config(config: ExperimentConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    parser[config.experiment] = {
        f.name: _emit_value(f.name, getattr(config, f.name))
        for f in fields(config)
        if f.name != "experiment"
    }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def load_config(path: str, experiment: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ContractError(f"cannot read config: {exc}") from None
    return parse_config(text, experiment)
