"""Scenario files: INI text describing one solver run.

Required sections [material], [grid], [time], [init], [tasks]; optional
[dispersion], [backward], [output].  Every key is validated against a
known set so typos fail loudly at parse time, before any numerics run.

The [material] section selects model = type2 (conservative) or type3
(dissipative) and may override any isotropic modulus; unset moduli fall
back to the reference material of the chosen model.  Conservative runs
must not carry rate moduli, so setting h_cond or rho1..rho3 nonzero
under model = type2 is rejected.
"""

import configparser
from dataclasses import dataclass, field

import numpy as np

from .discrete1d import FIELDS, Grid1D
from .errors import ParseError, ValidationError
from .evolve import InitialData
from .material import MaterialIsotropic, reference_type2, reference_type3, validate_isotropic

__all__ = ["InitSpec", "Scenario", "parse_scenario", "build_initial"]

_MODELS = ("type2", "type3")
_SCHEMES = ("midpoint", "rk4")
_PRESETS = ("zero", "sine", "impulse", "random")
_TASKS = ("simulate", "spectrum", "dispersion", "backward", "localization")

_MATERIAL_KEYS = frozenset({
    "model", "rho", "lambda_e", "mu_e", "beta", "c_cap", "alpha_m",
    "gamma1", "gamma2", "k_cond", "h_cond", "varpi", "hbar_c",
    "eta1", "eta2", "eta3", "rho1", "rho2", "rho3",
})
_GRID_KEYS = frozenset({"n_interior", "length"})
_TIME_KEYS = frozenset({"dt", "n_steps", "snapshot_every", "scheme"})
_INIT_KEYS = frozenset(
    {"preset", "seed", "amp", "field", "node"}
    | {f"{name}_mode" for name in FIELDS}
    | {f"{name}_amp" for name in FIELDS}
)
_TASK_KEYS = frozenset({"run"})
_DISPERSION_KEYS = frozenset({"k_min", "k_max", "n_k"})
_BACKWARD_KEYS = frozenset({"dt", "n_steps", "eps", "lam"})
_OUTPUT_KEYS = frozenset({"directory"})

_SECTION_KEYS = {
    "material": _MATERIAL_KEYS,
    "grid": _GRID_KEYS,
    "time": _TIME_KEYS,
    "init": _INIT_KEYS,
    "tasks": _TASK_KEYS,
    "dispersion": _DISPERSION_KEYS,
    "backward": _BACKWARD_KEYS,
    "output": _OUTPUT_KEYS,
}
_REQUIRED_SECTIONS = ("material", "grid", "time", "init", "tasks")


@dataclass(frozen=True)
class InitSpec:
    """Initial-data recipe; params hold the preset-specific knobs."""

    preset: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    model: str
    material: MaterialIsotropic
    grid: Grid1D
    dt: float
    n_steps: int
    snapshot_every: int
    scheme: str
    init: InitSpec
    tasks: tuple
    seed: int = 0
    k_min: float = 0.5
    k_max: float = 8.0
    n_k: int = 16
    backward_dt: float = 5e-5
    backward_n_steps: int = 200
    eps: float = 0.5
    lam: float = 2.0
    out_dir: str = ""


def _as_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(
            f"[{section}] {key}: could not parse {raw!r} as a number"
        ) from None


def _as_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(
            f"[{section}] {key}: could not parse {raw!r} as an integer"
        ) from None


def _require(parsed, section: str, key: str) -> str:
    if key not in parsed[section]:
        raise ParseError(f"missing key '{key}' in [{section}]")
    return parsed[section][key]


def parse_scenario(text: str) -> Scenario:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc

    parsed = {name: dict(parser[name]) for name in parser.sections()}
    for name in _REQUIRED_SECTIONS:
        if name not in parsed:
            raise ParseError(f"missing [{name}] section")
    for name, keys in parsed.items():
        known = _SECTION_KEYS.get(name)
        if known is None:
            raise ParseError(f"unknown section [{name}]")
        for key in keys:
            if key not in known:
                raise ParseError(f"unknown key '{key}' in [{name}]")

    mat_raw = parsed["material"]
    model = mat_raw.get("model", "").strip()
    if model not in _MODELS:
        raise ParseError(
            f"[material] model must be one of {_MODELS}, got {model!r}"
        )
    base = reference_type2() if model == "type2" else reference_type3()
    overrides = {
        key: _as_float("material", key, raw)
        for key, raw in mat_raw.items() if key != "model"
    }
    if model == "type2":
        if overrides.get("h_cond", 0.0) != 0.0:
            raise ValidationError(
                f"type II requires H=0, got h_cond = {overrides['h_cond']}"
            )
        for key in ("rho1", "rho2", "rho3"):
            if overrides.get(key, 0.0) != 0.0:
                raise ValidationError(
                    f"type II requires vanishing rate moduli, got {key} = "
                    f"{overrides[key]}"
                )
    material = MaterialIsotropic(**{**_material_fields(base), **overrides})
    report = validate_isotropic(material)
    if not report.valid:
        raise ValidationError(str(report))

    grid = Grid1D(
        n_interior=_as_int("grid", "n_interior", _require(parsed, "grid", "n_interior")),
        length=_as_float("grid", "length", parsed["grid"].get("length", "1.0")),
    )

    time_raw = parsed["time"]
    scheme = time_raw.get("scheme", "midpoint").strip()
    if scheme not in _SCHEMES:
        raise ParseError(f"[time] scheme must be one of {_SCHEMES}, got {scheme!r}")
    dt = _as_float("time", "dt", _require(parsed, "time", "dt"))
    n_steps = _as_int("time", "n_steps", _require(parsed, "time", "n_steps"))
    snapshot_every = _as_int("time", "snapshot_every",
                             time_raw.get("snapshot_every", "1"))
    if dt <= 0:
        raise ParseError(f"[time] dt must be positive, got {dt}")
    if n_steps < 0 or snapshot_every < 1 or n_steps % snapshot_every:
        raise ParseError(
            f"[time] n_steps = {n_steps} must be a nonnegative multiple of "
            f"snapshot_every = {snapshot_every}"
        )

    init_raw = parsed["init"]
    preset = init_raw.get("preset", "").strip()
    if preset not in _PRESETS:
        raise ParseError(f"[init] preset must be one of {_PRESETS}, got {preset!r}")
    params = {}
    for key, raw in init_raw.items():
        if key == "preset":
            continue
        if key in ("seed", "node"):
            params[key] = _as_int("init", key, raw)
        elif key == "field":
            if raw.strip() not in FIELDS:
                raise ParseError(f"[init] field must be one of {FIELDS}, got {raw!r}")
            params[key] = raw.strip()
        elif key.endswith("_mode"):
            params[key] = _as_int("init", key, raw)
        else:
            params[key] = _as_float("init", key, raw)
    init = InitSpec(preset=preset, params=params)
    seed = int(params.get("seed", 0))

    run_raw = parsed["tasks"].get("run", "")
    tasks = tuple(t for t in run_raw.replace(",", " ").split() if t)
    for task in tasks:
        if task not in _TASKS:
            raise ParseError(f"unknown task {task!r}, expected one of {_TASKS}")

    disp = parsed.get("dispersion", {})
    back = parsed.get("backward", {})
    out = parsed.get("output", {})
    scenario = Scenario(
        model=model,
        material=material,
        grid=grid,
        dt=dt,
        n_steps=n_steps,
        snapshot_every=snapshot_every,
        scheme=scheme,
        init=init,
        tasks=tasks,
        seed=seed,
        k_min=_as_float("dispersion", "k_min", disp.get("k_min", "0.5")),
        k_max=_as_float("dispersion", "k_max", disp.get("k_max", "8.0")),
        n_k=_as_int("dispersion", "n_k", disp.get("n_k", "16")),
        backward_dt=_as_float("backward", "dt", back.get("dt", "5e-5")),
        backward_n_steps=_as_int("backward", "n_steps", back.get("n_steps", "200")),
        eps=_as_float("backward", "eps", back.get("eps", "0.5")),
        lam=_as_float("backward", "lam", back.get("lam", "2.0")),
        out_dir=out.get("directory", ""),
    )
    if scenario.n_k < 1 or not 0 < scenario.k_min <= scenario.k_max:
        raise ParseError(
            f"[dispersion] needs 0 < k_min <= k_max and n_k >= 1, got "
            f"k_min = {scenario.k_min}, k_max = {scenario.k_max}, n_k = {scenario.n_k}"
        )
    return scenario


def _material_fields(m: MaterialIsotropic) -> dict:
    return {name: getattr(m, name) for name in _MATERIAL_KEYS if name != "model"}


def build_initial(scenario: Scenario) -> InitialData:
    """Realize the [init] recipe on the scenario grid."""
    grid, spec = scenario.grid, scenario.init
    n = grid.n_interior
    arrays = {name: np.zeros(n) for name in FIELDS}
    params = spec.params
    if spec.preset == "sine":
        x = grid.nodes
        for name in FIELDS:
            amp = params.get(f"{name}_amp", 0.0)
            if amp:
                mode = params.get(f"{name}_mode", 1)
                arrays[name] = amp * np.sin(mode * np.pi * x / grid.length)
    elif spec.preset == "impulse":
        name = params.get("field", "theta")
        node = params.get("node", n // 2)
        if not 0 <= node < n:
            raise ValidationError(f"impulse node {node} outside 0..{n - 1}")
        arrays[name] = np.zeros(n)
        arrays[name][node] = params.get("amp", 1.0)
    elif spec.preset == "random":
        rng = np.random.default_rng(params.get("seed", 0))
        amp = params.get("amp", 1.0)
        for name in FIELDS:
            arrays[name] = amp * rng.standard_normal(n)
    elif spec.preset != "zero":
        raise ValidationError(f"unknown preset {spec.preset!r}")
    return InitialData(u0=arrays["u"], v0=arrays["v"], tau0=arrays["tau"],
                       theta0=arrays["theta"], r0=arrays["r"], m0=arrays["m"])
