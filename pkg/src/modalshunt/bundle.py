"""
On-disk model and network bundles.

A bundle is a directory holding ``manifest.txt`` (``key=value`` lines) and
one Matrix Market array file per matrix. Values are written with
shortest round-trip precision, so export followed by import is bitwise
lossless.
"""

import os
from pathlib import Path

import numpy as np
import scipy.io as sio

from .model import ElectricalNetwork, ModelError, PiezoStructureModel

MANIFEST = "manifest.txt"
FORMAT_VERSION = "1"

MODEL_ROLES = ("mass", "stiffness_sc", "coupling", "capacitance_piezo")
NETWORK_ROLES = ("capacitance", "conductance", "reluctance", "localization")


def read_manifest(path):
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ModelError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            entries[key.strip()] = value.strip()
    return entries


def _write_bundle(path, kind, name, matrices, extra):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    lines = [f"kind={kind}", f"version={FORMAT_VERSION}", f"name={name}"]
    lines += [f"{k}={v}" for k, v in extra.items()]
    for role, mat in matrices.items():
        fname = f"{role}.mtx"
        # 'general' keeps the file layout independent of accidental symmetry
        sio.mmwrite(str(path / fname), np.asarray(mat, dtype=float), symmetry="general")
        lines.append(f"{role}={fname}")
    (path / MANIFEST).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_bundle(path, kind, roles):
    path = Path(path)
    manifest_path = path / MANIFEST
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no {MANIFEST} in {path}")
    entries = read_manifest(manifest_path)
    if entries.get("kind") != kind:
        raise ModelError(f"{path} holds kind={entries.get('kind')!r}, expected {kind!r}")
    mats = {}
    for role in roles:
        if role not in entries:
            raise ModelError(f"{manifest_path} does not name a {role} matrix")
        mat = sio.mmread(str(path / entries[role]))
        if hasattr(mat, "toarray"):
            mat = mat.toarray()
        mats[role] = np.asarray(mat, dtype=float)
    return entries, mats


def export_model(model, path):
    """Write a :class:`PiezoStructureModel` as a bundle directory."""
    _write_bundle(
        path,
        "piezo-structure",
        model.name,
        {r: getattr(model, r) for r in MODEL_ROLES},
        {"n_dof": model.n_dof, "n_transducers": model.n_transducers},
    )


def import_model(path, format="bundle"):
    """
    Load and validate a :class:`PiezoStructureModel`.

    Parameters
    ----------
    path : str or Path
        Bundle directory (``format="bundle"``) or ``.npz`` archive holding
        arrays named after the matrix roles (``format="npz"``).
    format : {"bundle", "npz"}
    """
    if format == "bundle":
        entries, mats = _read_bundle(path, "piezo-structure", MODEL_ROLES)
        name = entries.get("name", "model")
    elif format == "npz":
        if not os.path.isfile(path):
            raise FileNotFoundError(path)
        with np.load(path) as data:
            missing = [r for r in MODEL_ROLES if r not in data]
            if missing:
                raise ModelError(f"{path} lacks arrays {missing}")
            mats = {r: np.array(data[r], dtype=float) for r in MODEL_ROLES}
        name = Path(path).stem
    else:
        raise ValueError(f"unknown model format {format!r}")
    return PiezoStructureModel(name=name, **mats)


def export_network(net, path):
    """Write an :class:`ElectricalNetwork` as a bundle directory."""
    _write_bundle(
        path,
        "electrical-network",
        net.name,
        {r: getattr(net, r) for r in NETWORK_ROLES},
        {"n_ports": net.n_ports, "n_internal": net.n_internal, "n_total": net.n_total},
    )


def import_network(path):
    entries, mats = _read_bundle(path, "electrical-network", NETWORK_ROLES)
    return ElectricalNetwork(name=entries.get("name", "network"), **mats)
