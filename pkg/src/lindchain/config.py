"""Declarative experiment configuration (YAML, versioned schema).

``parse_config`` validates the whole document and reports every violation
at once rather than failing on the first; unknown keys are rejected so a
typo cannot silently disable an option.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError
from .model import Boundary
from .states import InitialStateSpec, Side, StateKind

SCHEMA_VERSION = 1

_MODEL_KEYS = {"J", "gamma_g", "gamma_l", "L", "boundary", "edge_compensation"}
_STATE_KEYS = {"label", "kind", "side", "width", "amplitude", "band"}
_BAND_KEYS = {"offset", "amplitude"}
_TIME_KEYS = {"t_min", "t_max", "grid", "points"}
_ANALYSIS_KEYS = {"crossings", "refine", "spectra", "oracle_check",
                  "fast_path", "fits"}
_FIT_KEYS = {"state", "kind", "window"}
_OUTPUT_KEYS = {"directory", "formats", "deviations"}
_TOP_KEYS = {"schema_version", "model", "states", "time", "analysis",
             "output", "seed"}


@dataclass(frozen=True)
class ModelConfig:
    J: float
    gamma_g: float
    gamma_l: float
    L: int
    boundary: Boundary = Boundary.OBC
    edge_compensation: bool = True


@dataclass(frozen=True)
class TimeConfig:
    t_max: float
    points: int
    grid: str = "log"
    t_min: float = 0.02

    def build_grid(self) -> np.ndarray:
        """Sample times; t = 0 is always included as the first point."""
        if self.grid == "linear":
            return np.linspace(0.0, self.t_max, self.points)
        return np.concatenate([[0.0], np.geomspace(self.t_min, self.t_max,
                                                   self.points)])


@dataclass(frozen=True)
class FitRequest:
    state: str
    kind: str                  # power_law | exponential
    window: object = "auto"    # (t_a, t_b) or "auto"


@dataclass(frozen=True)
class AnalysisConfig:
    crossings: bool = True
    refine: bool = True
    spectra: bool = False
    oracle_check: bool = False
    fast_path: str = "auto"
    fits: tuple = ()


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "."
    formats: tuple = ("csv", "json")
    deviations: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelConfig
    states: tuple
    time: TimeConfig
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0

    def canonical_dict(self) -> dict:
        states = []
        for s in self.states:
            states.append({
                "label": s.label, "kind": s.kind.value,
                "side": s.side.value if s.side else None,
                "width": s.width, "amplitude": s.amplitude,
                "band": [[o, [a.real, a.imag]] for o, a in s.band],
            })
        return {
            "schema_version": SCHEMA_VERSION,
            "model": {"J": self.model.J, "gamma_g": self.model.gamma_g,
                      "gamma_l": self.model.gamma_l, "L": self.model.L,
                      "boundary": self.model.boundary.value,
                      "edge_compensation": self.model.edge_compensation},
            "states": states,
            "time": {"t_min": self.time.t_min, "t_max": self.time.t_max,
                     "grid": self.time.grid, "points": self.time.points},
            "analysis": {
                "crossings": self.analysis.crossings,
                "refine": self.analysis.refine,
                "spectra": self.analysis.spectra,
                "oracle_check": self.analysis.oracle_check,
                "fast_path": self.analysis.fast_path,
                "fits": [{"state": f.state, "kind": f.kind,
                          "window": (list(f.window)
                                     if f.window != "auto" else "auto")}
                         for f in self.analysis.fits],
            },
            "output": {"directory": self.output.directory,
                       "formats": list(self.output.formats),
                       "deviations": self.output.deviations},
            "seed": self.seed,
        }

    def content_hash(self) -> str:
        raw = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(raw).hexdigest()


def _expect_mapping(node, where, bad):
    if not isinstance(node, dict):
        bad.append(f"{where}: expected a mapping, got {type(node).__name__}")
        return {}
    return node


def _unknown_keys(node, allowed, where, bad):
    extra = sorted(set(node) - allowed)
    for k in extra:
        bad.append(f"{where}: unknown key '{k}'")


def _number(node, key, where, bad, default=None, minimum=None,
            required=False):
    if key not in node:
        if required:
            bad.append(f"{where}: missing required key '{key}'")
        return default
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        bad.append(f"{where}.{key}: expected a number, got {v!r}")
        return default
    if minimum is not None and v < minimum:
        bad.append(f"{where}.{key}: must be >= {minimum}, got {v}")
        return default
    return float(v)


def _integer(node, key, where, bad, default=None, minimum=None,
             required=False):
    if key not in node:
        if required:
            bad.append(f"{where}: missing required key '{key}'")
        return default
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, int):
        bad.append(f"{where}.{key}: expected an integer, got {v!r}")
        return default
    if minimum is not None and v < minimum:
        bad.append(f"{where}.{key}: must be >= {minimum}, got {v}")
        return default
    return int(v)


def _boolean(node, key, where, bad, default):
    if key not in node:
        return default
    v = node[key]
    if not isinstance(v, bool):
        bad.append(f"{where}.{key}: expected true/false, got {v!r}")
        return default
    return v


def _choice(node, key, where, bad, allowed, default):
    if key not in node:
        return default
    v = node[key]
    if v not in allowed:
        bad.append(f"{where}.{key}: must be one of {sorted(allowed)}, "
                   f"got {v!r}")
        return default
    return v


def _parse_states(nodes, bad):
    if not isinstance(nodes, list):
        bad.append("states: expected a list")
        return ()
    out = []
    labels = set()
    for i, raw in enumerate(nodes):
        where = f"states[{i}]"
        node = _expect_mapping(raw, where, bad)
        _unknown_keys(node, _STATE_KEYS, where, bad)
        label = node.get("label")
        if not isinstance(label, str) or not label:
            bad.append(f"{where}: 'label' must be a nonempty string")
            label = f"state{i}"
        elif not all(ch.isalnum() or ch in "_-" for ch in label):
            bad.append(f"{where}: label '{label}' may only contain letters, "
                       "digits, '_' and '-'")
        if label in labels:
            bad.append(f"{where}: duplicate label '{label}'")
        labels.add(label)
        kind = _choice(node, "kind", where, bad,
                       {k.value for k in StateKind}, None)
        if kind is None:
            if "kind" not in node:
                bad.append(f"{where}: missing required key 'kind'")
            continue
        side = _choice(node, "side", where, bad, {s.value for s in Side},
                       None)
        width = _integer(node, "width", where, bad, minimum=1)
        amplitude = _number(node, "amplitude", where, bad, default=0.0)
        band_nodes = node.get("band", [])
        band = []
        if not isinstance(band_nodes, list):
            bad.append(f"{where}.band: expected a list")
            band_nodes = []
        for j, braw in enumerate(band_nodes):
            bwhere = f"{where}.band[{j}]"
            bnode = _expect_mapping(braw, bwhere, bad)
            _unknown_keys(bnode, _BAND_KEYS, bwhere, bad)
            off = _integer(bnode, "offset", bwhere, bad, required=True)
            amp = _number(bnode, "amplitude", bwhere, bad, required=True)
            if off is not None and amp is not None:
                band.append((off, amp))
        if kind == StateKind.DIAGONAL_EDGE.value:
            if side is None:
                bad.append(f"{where}: diagonal_edge requires 'side'")
            if width is None:
                bad.append(f"{where}: diagonal_edge requires 'width'")
        if kind == StateKind.OFFDIAGONAL_BAND.value and not band:
            bad.append(f"{where}: offdiagonal_band requires a 'band' list")
        if None in (kind,):
            continue
        try:
            out.append(InitialStateSpec(
                kind=StateKind(kind), label=label,
                side=Side(side) if side else None,
                width=width, amplitude=amplitude or 0.0,
                band=tuple(band)))
        except Exception as exc:            # state-spec validation error
            bad.append(f"{where}: {exc}")
    return tuple(out)


def _parse_fits(nodes, state_labels, bad):
    if not isinstance(nodes, list):
        bad.append("analysis.fits: expected a list")
        return ()
    out = []
    for i, raw in enumerate(nodes):
        where = f"analysis.fits[{i}]"
        node = _expect_mapping(raw, where, bad)
        _unknown_keys(node, _FIT_KEYS, where, bad)
        state = node.get("state")
        if not isinstance(state, str):
            bad.append(f"{where}: 'state' must name a configured state")
            continue
        if state_labels and state not in state_labels:
            bad.append(f"{where}: unknown state '{state}'")
        kind = _choice(node, "kind", where, bad,
                       {"power_law", "exponential"}, None)
        if kind is None:
            bad.append(f"{where}: 'kind' must be power_law or exponential")
            continue
        window = node.get("window", "auto")
        if window != "auto":
            ok = (isinstance(window, list) and len(window) == 2
                  and all(isinstance(x, (int, float))
                          and not isinstance(x, bool) for x in window)
                  and window[0] < window[1])
            if not ok:
                bad.append(f"{where}.window: expected 'auto' or [t_a, t_b] "
                           "with t_a < t_b")
                continue
            window = (float(window[0]), float(window[1]))
        out.append(FitRequest(state=state, kind=kind, window=window))
    return tuple(out)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML experiment config.

    Raises :class:`ConfigError` carrying every violation found.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from exc
    bad: list[str] = []
    doc = _expect_mapping(doc, "top level", bad)
    _unknown_keys(doc, _TOP_KEYS, "top level", bad)

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        bad.append(f"schema_version: expected {SCHEMA_VERSION}, "
                   f"got {version!r}")

    mnode = _expect_mapping(doc.get("model", {}), "model", bad)
    _unknown_keys(mnode, _MODEL_KEYS, "model", bad)
    J = _number(mnode, "J", "model", bad, minimum=0.0, required=True)
    gg = _number(mnode, "gamma_g", "model", bad, minimum=0.0, required=True)
    gl = _number(mnode, "gamma_l", "model", bad, minimum=0.0, required=True)
    L = _integer(mnode, "L", "model", bad, minimum=2, required=True)
    boundary = _choice(mnode, "boundary", "model", bad,
                       {b.value for b in Boundary}, Boundary.OBC.value)
    comp = _boolean(mnode, "edge_compensation", "model", bad, True)

    states = _parse_states(doc.get("states", []), bad)

    tnode = _expect_mapping(doc.get("time", {}), "time", bad)
    _unknown_keys(tnode, _TIME_KEYS, "time", bad)
    t_max = _number(tnode, "t_max", "time", bad, required=True)
    points = _integer(tnode, "points", "time", bad, minimum=16, required=True)
    grid = _choice(tnode, "grid", "time", bad, {"log", "linear"}, "log")
    t_min = _number(tnode, "t_min", "time", bad, default=0.02)
    if t_max is not None and t_max <= 0:
        bad.append("time.t_max: must be positive")
    if grid == "log" and t_min is not None and t_min <= 0:
        bad.append("time.t_min: must be positive for a log grid")
    if (t_min is not None and t_max is not None and grid == "log"
            and t_min >= t_max):
        bad.append("time: t_min must be below t_max")

    anode = _expect_mapping(doc.get("analysis", {}), "analysis", bad)
    _unknown_keys(anode, _ANALYSIS_KEYS, "analysis", bad)
    analysis = AnalysisConfig(
        crossings=_boolean(anode, "crossings", "analysis", bad, True),
        refine=_boolean(anode, "refine", "analysis", bad, True),
        spectra=_boolean(anode, "spectra", "analysis", bad, False),
        oracle_check=_boolean(anode, "oracle_check", "analysis", bad, False),
        fast_path=_choice(anode, "fast_path", "analysis", bad,
                          {"auto", "off", "require"}, "auto"),
        fits=_parse_fits(anode.get("fits", []),
                         {s.label for s in states}, bad),
    )

    onode = _expect_mapping(doc.get("output", {}), "output", bad)
    _unknown_keys(onode, _OUTPUT_KEYS, "output", bad)
    directory = onode.get("directory", ".")
    if not isinstance(directory, str):
        bad.append("output.directory: expected a string")
        directory = "."
    formats = onode.get("formats", ["csv", "json"])
    if (not isinstance(formats, list) or
            not set(formats) <= {"csv", "json"} or not formats):
        bad.append("output.formats: expected a nonempty subset of "
                   "[csv, json]")
        formats = ["csv", "json"]
    output = OutputConfig(directory=directory, formats=tuple(formats),
                          deviations=_boolean(onode, "deviations", "output",
                                              bad, False))

    seed = _integer(doc, "seed", "top level", bad, default=0)

    if bad:
        raise ConfigError(bad)
    return ExperimentConfig(
        model=ModelConfig(J=J, gamma_g=gg, gamma_l=gl, L=L,
                          boundary=Boundary(boundary),
                          edge_compensation=comp),
        states=states,
        time=TimeConfig(t_max=t_max, points=points, grid=grid,
                        t_min=t_min if t_min is not None else 0.02),
        analysis=analysis,
        output=output,
        seed=seed if seed is not None else 0,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
