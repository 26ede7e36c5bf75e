"""JSON interchange: string-encoded exact scalars, canonical key order."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .dvcore import DVInstance
from .exactfield import FieldSpec, Matrix
from .grassmann import Subspace, subspace_from_rows
from .trivector import Alternating3Form, FrameComponents


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write(obj: Any, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def matrix_to_json(m: Matrix) -> list[list[str]]:
    return m.to_strings()


def matrix_from_json(rows: list, field: FieldSpec, ncols: int | None = None) -> Matrix:
    return Matrix.from_rows([[field(x) for x in r] for r in rows], field, ncols)


def subspace_to_json(s: Subspace) -> dict:
    return {"ambient_dim": s.ambient_dim, "rows": s.basis.to_strings()}


def subspace_from_json(d: dict, field: FieldSpec) -> Subspace:
    # input rows are canonicalised on load
    return subspace_from_rows(matrix_from_json(d["rows"], field, d["ambient_dim"]))


def form_to_json(form: Alternating3Form) -> dict:
    f = form.field
    return {
        "ambient_dim": form.ambient_dim,
        "field": f.label,
        "coeffs": [[i, j, k, f.to_str(v)] for (i, j, k), v in sorted(form.coeffs.items())],
    }


def form_from_json(d: dict) -> Alternating3Form:
    f = FieldSpec.from_label(d["field"])
    return Alternating3Form(d["ambient_dim"], f, {(int(i), int(j), int(k)): f(v) for i, j, k, v in d["coeffs"]})


def instance_to_json(inst: DVInstance) -> dict:
    return {"alpha": form_to_json(inst.alpha), "provenance": dict(inst.provenance)}


def instance_from_json(d: dict) -> DVInstance:
    return DVInstance(form_from_json(d["alpha"]), dict(d.get("provenance", {})))


def components_to_json(q: FrameComponents) -> dict:
    return {"field": q.field.label, "Q1": q.Q1.to_strings(), "Q2": q.Q2.to_strings(), "Q3": q.Q3.to_strings()}


def components_from_json(d: dict) -> FrameComponents:
    f = FieldSpec.from_label(d.get("field", "q"))
    return FrameComponents(*(matrix_from_json(d[k], f, 3) for k in ("Q1", "Q2", "Q3")))


def scenario_file(inst: DVInstance, subspaces: list[Subspace], kind: str) -> dict:
    """File written by ``gen``: the instance and its seeded subspaces."""
    return {
        "kind": kind,
        "instance": instance_to_json(inst),
        "subspaces": [subspace_to_json(s) for s in subspaces],
    }


def load_scenario(d: dict) -> tuple[DVInstance, list[Subspace]]:
    inst = instance_from_json(d["instance"])
    if "subspaces" in d:
        subs = d["subspaces"]
    else:
        subs = [d[k] for k in ("W1", "W2", "W3") if k in d]
    return inst, [subspace_from_json(s, inst.field) for s in subs]
