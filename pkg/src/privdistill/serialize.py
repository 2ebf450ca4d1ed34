"""JSON interchange for matrices, layouts, specs, and reports.

Complex matrices are stored row-major as [re, im] pairs. Output is always
`json.dumps(obj, sort_keys=True, indent=2)` so that identical inputs give
byte-identical files; nothing time- or host-dependent is ever embedded.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from typing import Any

import numpy as np

from .linalg import Factor, SubsystemLayout
from .private_states import PrivateStateSpec, shield_layout
from .states import DensityMatrix, validate_state, validate_unitary


def layout_to_json(lay: SubsystemLayout) -> list[dict[str, Any]]:
    return [
        {"label": f.label, "dim": f.dim, "party": f.party, "role": f.role}
        for f in lay.factors
    ]


def layout_from_json(obj: list[dict[str, Any]]) -> SubsystemLayout:
    return SubsystemLayout(
        factors=tuple(
            Factor(
                label=str(f["label"]),
                dim=int(f["dim"]),
                party=int(f["party"]),
                role=str(f["role"]),
            )
            for f in obj
        )
    )


def matrix_to_json(
    mat: np.ndarray, lay: SubsystemLayout | None = None
) -> dict[str, Any]:
    mat = np.asarray(mat, dtype=complex)
    out: dict[str, Any] = {
        "rows": mat.shape[0],
        "cols": mat.shape[1],
        "data": [[float(z.real), float(z.imag)] for z in mat.ravel()],
    }
    if lay is not None:
        out["layout"] = layout_to_json(lay)
    return out


def matrix_from_json(obj: dict[str, Any]) -> tuple[np.ndarray, SubsystemLayout | None]:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"matrix data has {len(data)} entries, expected {rows * cols}")
    flat = np.array([complex(re, im) for re, im in data])
    lay = layout_from_json(obj["layout"]) if "layout" in obj else None
    return flat.reshape(rows, cols), lay


def state_to_json(state: DensityMatrix) -> dict[str, Any]:
    return matrix_to_json(state.matrix, state.layout)


def state_from_json(obj: dict[str, Any]) -> DensityMatrix:
    mat, lay = matrix_from_json(obj)
    return validate_state(mat, lay)


def spec_to_json(spec: PrivateStateSpec) -> dict[str, Any]:
    return {
        "d": spec.d,
        "parties": spec.parties,
        "shield_dims": list(spec.shield_dims),
        "unitaries": [matrix_to_json(u.matrix) for u in spec.unitaries],
        "shield": matrix_to_json(spec.shield.matrix),
    }


def spec_from_json(obj: dict[str, Any]) -> PrivateStateSpec:
    """Rebuild a spec, re-validating the shield state and every unitary."""
    dims = tuple(int(x) for x in obj["shield_dims"])
    shield_mat, _ = matrix_from_json(obj["shield"])
    shield = validate_state(shield_mat, shield_layout(dims))
    unitaries = tuple(
        validate_unitary(matrix_from_json(u)[0]) for u in obj["unitaries"]
    )
    return PrivateStateSpec(
        d=int(obj["d"]),
        parties=int(obj["parties"]),
        shield_dims=dims,
        unitaries=unitaries,
        shield=shield,
    )


def report_to_json(report: Any) -> Any:
    """Dataclass (possibly nested) to plain JSON-ready structures."""
    return dataclasses.asdict(report)


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(obj: Any, path: str | None) -> None:
    """Write deterministic JSON to a file, or stdout when path is None/'-'."""
    text = dumps(obj)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
