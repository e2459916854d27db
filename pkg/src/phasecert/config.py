"""Analysis configuration: JSON ingestion with location-tagged validation.

Complex scalars are serialized as two-element arrays [re, im]; matrices as
row-major nested arrays.  A plant is a state-space document with four real
matrix fields "a", "b", "c", "d"; a perturbation is either another
state-space document or per-frequency bound tables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .blocks import BlockDims
from .certify import CRITERIA, Margins
from .errors import ConfigError
from .lti import StateSpace


def _fail(where: str, msg: str):
    raise ConfigError(f"{where}: {msg}")


def parse_complex_scalar(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    _fail(where, "expected a number or a two-element [re, im] array")


def parse_complex_matrix(doc, where: str = "matrix") -> np.ndarray:
    if not isinstance(doc, list) or not doc:
        _fail(where, "expected a non-empty nested array")
    n = len(doc)
    out = np.zeros((n, len(doc[0]) if isinstance(doc[0], list) else 0), dtype=complex)
    for i, row in enumerate(doc):
        if not isinstance(row, list) or len(row) != out.shape[1]:
            _fail(f"{where}[{i}]", "rows must be arrays of equal length")
        for k, entry in enumerate(row):
            out[i, k] = parse_complex_scalar(entry, f"{where}[{i}][{k}]")
    if out.shape[0] != out.shape[1]:
        _fail(where, f"matrix must be square, got {out.shape[0]}x{out.shape[1]}")
    return out


def load_matrix_file(path) -> np.ndarray:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(doc, dict):
        if "matrix" not in doc:
            _fail(str(path), "missing field 'matrix'")
        return parse_complex_matrix(doc["matrix"], "matrix")
    return parse_complex_matrix(doc, "matrix")


def parse_real_matrix(doc, where: str) -> np.ndarray:
    arr = np.asarray(doc, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        _fail(where, "expected a (possibly empty) real matrix")
    return arr


def parse_statespace(doc, where: str, stable: bool = True) -> StateSpace:
    if not isinstance(doc, dict):
        _fail(where, "expected an object with fields a, b, c, d")
    for name in ("a", "b", "c", "d"):
        if name not in doc:
            _fail(where, f"missing field '{name}'")
    try:
        return StateSpace(parse_real_matrix(doc["a"], f"{where}.a"),
                          parse_real_matrix(doc["b"], f"{where}.b"),
                          parse_real_matrix(doc["c"], f"{where}.c"),
                          parse_real_matrix(doc["d"], f"{where}.d"),
                          stable=stable)
    except ValueError as exc:
        _fail(where, str(exc))


def parse_structure(doc, where: str = "structure") -> BlockDims:
    if not isinstance(doc, dict):
        _fail(where, "expected an object with scalar_dims and full_dims arrays")
    try:
        return BlockDims(tuple(doc.get("scalar_dims", ())),
                         tuple(doc.get("full_dims", ())))
    except (TypeError, ValueError) as exc:
        _fail(where, str(exc))


@dataclass(frozen=True)
class BoundTable:
    """Piecewise-linear per-frequency bound with constant extrapolation."""

    omegas: np.ndarray
    values: np.ndarray

    def __call__(self, omega: float) -> float:
        if math.isinf(omega):
            return float(self.values[-1])
        return float(np.interp(omega, self.omegas, self.values))


def parse_bound_table(doc, where: str) -> BoundTable:
    if not isinstance(doc, list) or not doc:
        _fail(where, "expected a non-empty array of [omega, value] pairs")
    pairs = []
    for i, item in enumerate(doc):
        if (not isinstance(item, list) or len(item) != 2
                or not all(isinstance(v, (int, float)) for v in item)):
            _fail(f"{where}[{i}]", "expected an [omega, value] pair")
        pairs.append((float(item[0]), float(item[1])))
    pairs.sort()
    omegas = np.array([p[0] for p in pairs])
    values = np.array([p[1] for p in pairs])
    if np.any(np.diff(omegas) <= 0):
        _fail(where, "frequencies must be distinct")
    return BoundTable(omegas, values)


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    points: int
    spacing: str = "log"
    include_zero: bool = True
    include_inf: bool = True

    def build(self) -> list[float]:
        if self.spacing == "log":
            base = np.logspace(math.log10(self.lo), math.log10(self.hi),
                               self.points)
        else:
            base = np.linspace(self.lo, self.hi, self.points)
        grid = [float(w) for w in base]
        if self.include_zero and grid[0] > 0.0:
            grid = [0.0] + grid
        if self.include_inf:
            grid = grid + [math.inf]
        return grid


def parse_grid(doc, where: str = "grid") -> GridSpec:
    if not isinstance(doc, dict):
        _fail(where, "expected an object")
    lo = doc.get("min")
    hi = doc.get("max")
    points = doc.get("points")
    if not isinstance(lo, (int, float)) or lo <= 0:
        _fail(f"{where}.min", "must be a positive number")
    if not isinstance(hi, (int, float)) or hi <= lo:
        _fail(f"{where}.max", "must exceed grid.min")
    if not isinstance(points, int) or points < 2:
        _fail(f"{where}.points", "must be an integer >= 2")
    spacing = doc.get("spacing", "log")
    if spacing not in ("log", "linear"):
        _fail(f"{where}.spacing", "must be 'log' or 'linear'")
    return GridSpec(float(lo), float(hi), points, spacing,
                    bool(doc.get("include_zero", True)),
                    bool(doc.get("include_inf", True)))


@dataclass(frozen=True)
class AnalysisConfig:
    plant: StateSpace
    structure: BlockDims
    grid: GridSpec
    criteria: tuple[str, ...]
    margins: Margins
    seed: int
    perturbation_system: StateSpace | None = None
    phase_bound: BoundTable | None = None
    gain_bound: BoundTable | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def uses_bounds(self) -> bool:
        return self.perturbation_system is None


def parse_config(doc: dict) -> AnalysisConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    for name in ("plant", "perturbation", "structure", "grid"):
        if name not in doc:
            _fail("config", f"missing field '{name}'")

    plant = parse_statespace(doc["plant"], "plant")
    structure = parse_structure(doc["structure"])
    if structure.n != plant.n_outputs:
        _fail("structure", f"total dimension {structure.n} does not match the "
              f"plant output dimension {plant.n_outputs}")
    if plant.n_outputs != plant.n_inputs:
        _fail("plant", "plant must be square for a feedback loop")
    grid = parse_grid(doc["grid"])

    pert = doc["perturbation"]
    pert_sys = None
    phase_tab = gain_tab = None
    if isinstance(pert, dict) and {"a", "b", "c", "d"} <= set(pert.keys()):
        pert_sys = parse_statespace(pert, "perturbation")
        if pert_sys.n_outputs != plant.n_inputs:
            _fail("perturbation", "loop dimensions do not match the plant")
    elif isinstance(pert, dict) and ("phase_bound" in pert or "gain_bound" in pert):
        if "phase_bound" not in pert or "gain_bound" not in pert:
            _fail("perturbation", "bound tables need both phase_bound and gain_bound")
        phase_tab = parse_bound_table(pert["phase_bound"], "perturbation.phase_bound")
        gain_tab = parse_bound_table(pert["gain_bound"], "perturbation.gain_bound")
    else:
        _fail("perturbation", "expected a state-space document or bound tables")

    criteria = tuple(doc.get("criteria", ("phase", "gain")))
    for c in criteria:
        if c not in CRITERIA:
            _fail("criteria", f"unknown criterion {c!r}")
    if not criteria:
        _fail("criteria", "at least one criterion is required")
    if pert_sys is None and "passivity" in criteria:
        _fail("criteria", "the passivity criterion needs a state-space perturbation")

    mdoc = doc.get("margins", {})
    if not isinstance(mdoc, dict):
        _fail("margins", "expected an object")
    margins = Margins(phase=float(mdoc.get("phase", Margins.phase)),
                      gain=float(mdoc.get("gain", Margins.gain)))
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        _fail("seed", "must be an integer")

    return AnalysisConfig(plant=plant, structure=structure, grid=grid,
                          criteria=criteria, margins=margins, seed=seed,
                          perturbation_system=pert_sys,
                          phase_bound=phase_tab, gain_bound=gain_tab, raw=doc)


def load_config(path) -> AnalysisConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(doc)
