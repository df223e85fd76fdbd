"""
Scenario files: one TOML document per experiment.

Example::

    name = "beam_4modes"
    seed = 0

    [model]
    source = "beam"            # or "import" with path = "bundle_dir"

    [model.beam]               # BeamConfig overrides
    n_groups = 2               # or grouping = [[0, 1, ...], ...]

    [synthesis]
    n_targets = 4              # first flexible modes, or targeted_modes = [2, 3]
    relative_scaling = [1, 1, 1, 1]

    [comparison]
    kind = "analog-cells"

    [[sweeps]]
    name = "tip"
    f_min = 10.0
    f_max = 700.0

    [outputs]
    dir = "out/beam_4modes"
"""

import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .beam import AnalogCellConfig, BeamConfig, build_beam, contiguous_groups
from .bundle import import_model
from .frf import SweepConfig
from .model import ModelError, SynthesisConfig


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario file."""


@dataclass(frozen=True)
class SynthesisSpec:
    """Synthesis settings; targets may be given as a count of flexible modes."""

    targeted_modes: Optional[tuple] = None
    n_targets: Optional[int] = None
    relative_scaling: Optional[tuple] = None
    internal_shape_policy: str = "identity-pad"
    alpha_fraction: float = 1.0
    complement_policy: str = "whitened"

    def resolve(self, mech, seed):
        if self.targeted_modes is not None:
            targets = tuple(self.targeted_modes)
        else:
            flex = mech.flexible_indices
            if self.n_targets > flex.size:
                raise ScenarioError(f"only {flex.size} flexible modes available")
            targets = tuple(int(i) for i in flex[: self.n_targets])
        bad = [r for r in targets if not 0 <= r < mech.n_modes]
        if bad:
            raise ScenarioError(f"targeted mode index out of range: {bad}")
        try:
            return SynthesisConfig(
                targets,
                self.relative_scaling,
                self.internal_shape_policy,
                self.alpha_fraction,
                self.complement_policy,
                seed,
            )
        except ModelError as exc:
            raise ScenarioError(f"[synthesis]: {exc}") from None


@dataclass(frozen=True)
class Scenario:
    name: str
    model_source: str
    beam: Optional[BeamConfig] = None
    import_path: Optional[Path] = None
    import_format: str = "bundle"
    synthesis: Optional[SynthesisSpec] = None
    comparison: str = "none"
    analog: AnalogCellConfig = field(default_factory=AnalogCellConfig)
    sweeps: tuple = ()
    band_halfwidth: float = 0.15
    band_modes: Optional[tuple] = None
    outputs: Path = Path("out")
    seed: int = 0

    def build_model(self):
        if self.model_source == "beam":
            return build_beam(self.beam)
        return import_model(self.import_path, self.import_format)


def _check_keys(table, allowed, where):
    unknown = set(table) - set(allowed)
    if unknown:
        raise ScenarioError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _table(doc, key, where):
    val = doc.get(key, {})
    if not isinstance(val, dict):
        raise ScenarioError(f"{where}.{key} must be a table")
    return val


def _beam_config(tab):
    allowed = [f.name for f in fields(BeamConfig)] + ["n_groups"]
    _check_keys(tab, allowed, "[model.beam]")
    tab = dict(tab)
    n_groups = tab.pop("n_groups", None)
    cfg = BeamConfig(**tab)
    if n_groups is not None:
        if cfg.grouping is not None:
            raise ScenarioError("give either grouping or n_groups, not both")
        cfg = replace(cfg, grouping=contiguous_groups(cfg.n_cells, int(n_groups)))
    return cfg


def load_scenario(path):
    """Parse and validate a scenario file; relative paths resolve against its folder."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    try:
        return _parse(doc, path)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (ScenarioError, ModelError)):
            raise
        raise ScenarioError(f"{path}: {exc}") from None


def _parse(doc, path):
    base = path.parent
    _check_keys(doc, ["name", "seed", "model", "synthesis", "comparison", "sweeps",
                      "analysis", "outputs"], "scenario")
    name = str(doc.get("name", path.stem))
    seed = int(doc.get("seed", 0))

    mtab = _table(doc, "model", "scenario")
    _check_keys(mtab, ["source", "beam", "path", "format"], "[model]")
    source = mtab.get("source", "beam")
    kw = {}
    if source == "beam":
        kw["beam"] = _beam_config(_table(mtab, "beam", "model"))
    elif source == "import":
        if "path" not in mtab:
            raise ScenarioError("[model] source='import' needs a path")
        kw["import_path"] = base / mtab["path"]
        if not kw["import_path"].exists():
            raise ScenarioError(f"model file not found: {kw['import_path']}")
        kw["import_format"] = mtab.get("format", "bundle")
        if kw["import_format"] not in ("bundle", "npz"):
            raise ScenarioError(f"unknown model format {kw['import_format']!r}")
    else:
        raise ScenarioError(f"unknown model source {source!r}")

    synthesis = None
    if "synthesis" in doc:
        stab = _table(doc, "synthesis", "scenario")
        _check_keys(stab, [f.name for f in fields(SynthesisSpec)], "[synthesis]")
        stab = dict(stab)
        if ("targeted_modes" in stab) == ("n_targets" in stab):
            raise ScenarioError("[synthesis] needs exactly one of targeted_modes, n_targets")
        for key in ("targeted_modes", "relative_scaling"):
            if key in stab:
                stab[key] = tuple(stab[key])
        synthesis = SynthesisSpec(**stab)

    comparison = "none"
    analog = AnalogCellConfig()
    if "comparison" in doc:
        ctab = _table(doc, "comparison", "scenario")
        _check_keys(ctab, ["kind", "analog"], "[comparison]")
        comparison = ctab.get("kind", "none")
        if comparison not in ("none", "analog-cells"):
            raise ScenarioError(f"unknown comparison {comparison!r}")
        atab = _table(ctab, "analog", "comparison")
        _check_keys(atab, [f.name for f in fields(AnalogCellConfig)], "[comparison.analog]")
        analog = AnalogCellConfig(**atab)
        if comparison == "analog-cells" and source != "beam":
            raise ScenarioError("analog-cells comparison needs the beam model source")

    sweeps = []
    raw = doc.get("sweeps", [])
    if not isinstance(raw, list):
        raise ScenarioError("sweeps must be an array of tables")
    for i, stab in enumerate(raw):
        _check_keys(stab, [f.name for f in fields(SweepConfig)], f"[[sweeps]] #{i}")
        stab = dict(stab)
        stab.setdefault("name", f"sweep{i}")
        if source == "beam":
            # excited at one end, observed at the other (deflection dofs)
            stab.setdefault("output_dof", -2)
        try:
            sweeps.append(SweepConfig(**stab))
        except ModelError as exc:
            raise ScenarioError(f"[[sweeps]] #{i}: {exc}") from None

    if synthesis is None and comparison == "none" and not sweeps:
        raise ScenarioError("scenario needs at least one of synthesis, comparison, sweeps")

    atab = _table(doc, "analysis", "scenario")
    _check_keys(atab, ["band_halfwidth", "band_modes"], "[analysis]")
    band_modes = atab.get("band_modes")
    otab = _table(doc, "outputs", "scenario")
    _check_keys(otab, ["dir"], "[outputs]")
    return Scenario(
        name=name,
        model_source=source,
        synthesis=synthesis,
        comparison=comparison,
        analog=analog,
        sweeps=tuple(sweeps),
        band_halfwidth=float(atab.get("band_halfwidth", 0.15)),
        band_modes=None if band_modes is None else tuple(int(i) for i in band_modes),
        outputs=base / otab.get("dir", f"out/{name}"),
        seed=seed,
        **kw,
    )
