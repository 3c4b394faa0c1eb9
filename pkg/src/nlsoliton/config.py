"""JSON run configuration.

Example::

    {
      "waveguide": {"omega0": 1.0, "k0": 1.0, "vg": 1.0, "gvd_C": 2.0, "kerr_K": 2.0},
      "initial": {"soliton": {"amplitude_A": 1.0, "width_xi": 1.0}},
      "grid": {"z_min": -20.0, "z_max": 20.0, "n_points": 1024},
      "stepper": {"dt": 0.001, "t_end": 1.0, "snapshot_stride": 100, "scheme": "strang"},
      "outputs": {"dir": "out"},
      "analysis": {"n_max": null, "zetas": [-1.0, 0.0, 0.7, 2.0]}
    }

``initial`` holds exactly one of ``soliton`` (``width_xi`` plus optional
``amplitude_A``, derived from the balance condition when omitted), ``zs``
(``eta, xi_zs, x0, phi, A0``) or ``photon_number`` (a number).
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .field import ComplexField, Grid, WaveguideParams
from .propagator import StepperConfig
from .soliton import (
    SolitonParams,
    ZSParams,
    from_photon_number,
    soliton_field,
    zs_soliton_field,
)

DEFAULT_ZETAS = (-1.0, 0.0, 0.7, 2.0)

DEFAULT_CONFIG = {
    "waveguide": {"omega0": 1.0, "k0": 1.0, "vg": 1.0, "gvd_C": 2.0, "kerr_K": 2.0},
    "initial": {"soliton": {"amplitude_A": 1.0, "width_xi": 1.0}},
    "grid": {"z_min": -20.0, "z_max": 20.0, "n_points": 1024},
    "stepper": {"dt": 1e-3, "t_end": 1.0, "snapshot_stride": 100, "scheme": "strang"},
    "outputs": {"dir": "out"},
    "analysis": {"n_max": None, "zetas": list(DEFAULT_ZETAS)},
}

_INITIAL_KINDS = ("soliton", "zs", "photon_number")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InitialCondition:
    soliton: SolitonParams | None = None
    zs: ZSParams | None = None
    photon_number: float | None = None

    def __post_init__(self):
        given = [k for k in _INITIAL_KINDS if getattr(self, k) is not None]
        if len(given) != 1:
            raise ConfigError(f"exactly one initial condition required, got {given or 'none'}")

    @property
    def kind(self) -> str:
        return next(k for k in _INITIAL_KINDS if getattr(self, k) is not None)

    def soliton_params(self, w: WaveguideParams) -> SolitonParams:
        if self.soliton is not None:
            return self.soliton
        if self.photon_number is not None:
            return from_photon_number(self.photon_number, w)
        raise ConfigError("initial condition is a four-parameter soliton, not (A, xi)")


@dataclass(frozen=True)
class RunConfig:
    waveguide: WaveguideParams
    initial: InitialCondition
    grid: Grid
    stepper: StepperConfig
    out_dir: str = "out"
    n_max: int | None = None
    zetas: tuple[float, ...] = field(default=DEFAULT_ZETAS)

    def initial_field(self) -> ComplexField:
        if self.initial.zs is not None:
            return zs_soliton_field(self.initial.zs, self.grid, 0.0)
        return soliton_field(self.initial.soliton_params(self.waveguide), self.waveguide, self.grid, 0.0)

    def to_dict(self) -> dict:
        init = self.initial
        if init.soliton is not None:
            initial = {"soliton": asdict(init.soliton)}
        elif init.zs is not None:
            initial = {"zs": asdict(init.zs)}
        else:
            initial = {"photon_number": init.photon_number}
        return {
            "waveguide": asdict(self.waveguide),
            "initial": initial,
            "grid": asdict(self.grid),
            "stepper": asdict(self.stepper),
            "outputs": {"dir": self.out_dir},
            "analysis": {"n_max": self.n_max, "zetas": list(self.zetas)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _section(d: dict, name: str, required=True) -> dict:
    sec = d.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section {name!r}")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be an object")
    return sec


def _build(cls, sec: dict, name: str):
    try:
        return cls(**sec)
    except TypeError as e:
        raise ConfigError(f"{name}: {e}") from None
    except ValueError as e:
        raise ConfigError(f"{name}: {e}") from None


def _initial(sec: dict, w: WaveguideParams) -> InitialCondition:
    kinds = [k for k in sec if k in _INITIAL_KINDS]
    unknown = [k for k in sec if k not in _INITIAL_KINDS]
    if unknown:
        raise ConfigError(f"initial: unknown keys {unknown}")
    if len(kinds) != 1:
        raise ConfigError(f"initial: exactly one of {_INITIAL_KINDS} required, got {kinds or 'none'}")
    kind = kinds[0]
    if kind == "photon_number":
        n = sec[kind]
        if not isinstance(n, (int, float)) or isinstance(n, bool) or not n > 0:
            raise ConfigError("initial.photon_number must be a positive number")
        return InitialCondition(photon_number=float(n))
    if kind == "zs":
        return InitialCondition(zs=_build(ZSParams, _section(sec, "zs"), "initial.zs"))
    sol = dict(_section(sec, "soliton"))
    if "width_xi" not in sol:
        raise ConfigError("initial.soliton: width_xi is required")
    if sol.get("amplitude_A") is None:
        if not w.supports_bright_soliton:
            raise ConfigError("initial.soliton: amplitude_A cannot be derived without C*K > 0")
        try:
            return InitialCondition(soliton=SolitonParams.from_width(sol["width_xi"], w))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"initial.soliton: {e}") from None
    return InitialCondition(soliton=_build(SolitonParams, sol, "initial.soliton"))


def from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    w = _build(WaveguideParams, _section(d, "waveguide"), "waveguide")
    initial = _initial(_section(d, "initial"), w)
    grid_sec = _section(d, "grid")
    if not grid_sec:
        raise ConfigError("grid: empty grid specification")
    grid = _build(Grid, grid_sec, "grid")
    stepper = _build(StepperConfig, _section(d, "stepper"), "stepper")
    outputs = _section(d, "outputs", required=False)
    analysis = _section(d, "analysis", required=False)
    n_max = analysis.get("n_max")
    if n_max is not None and (not isinstance(n_max, int) or isinstance(n_max, bool) or n_max < 0):
        raise ConfigError("analysis.n_max must be a non-negative integer or null")
    zetas = analysis.get("zetas", list(DEFAULT_ZETAS))
    try:
        zetas = tuple(float(z) for z in zetas)
    except (TypeError, ValueError):
        raise ConfigError("analysis.zetas must be a list of numbers") from None
    return RunConfig(w, initial, grid, stepper, str(outputs.get("dir", "out")), n_max, zetas)


def loads(text: str) -> RunConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return from_dict(d)


def load(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return loads(text)


def default_dict() -> dict:
    return copy.deepcopy(DEFAULT_CONFIG)
