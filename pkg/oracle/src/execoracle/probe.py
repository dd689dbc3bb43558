"""Probe engine: execute a snippet against the instrumented frame, capture an
output signature, then re-run with each accessed column resampled and flag the
columns whose signature changes."""

from __future__ import annotations

import ast
import contextlib
import io
import traceback

import numpy as np
import pandas as pd

from .protocol import ObservedInfluence
from .tracing import TracedFrame

ROW_PARAM_NAMES = {"row", "person", "record", "sample", "applicant", "individual"}
RESULT_NAMES = ("predictions", "prediction", "preds", "y_pred", "pred", "result",
                "results", "output", "scores", "score", "accuracy", "report")
PATCHED_READERS = ("read_csv", "read_table", "read_parquet", "read_json",
                   "read_excel", "read_pickle")


def _normalize(name: str) -> str:
    return name.strip().strip("'\"").lower().replace("-", "_").replace(" ", "_")


def canon(obj):
    """JSON-compatible, order-stable output signature; floats rounded so BLAS
    noise cannot masquerade as influence."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round(float(obj), 9)
    if isinstance(obj, np.ndarray):
        return [canon(x) for x in obj.tolist()]
    if isinstance(obj, pd.DataFrame):
        return [[canon(v) for v in row] for row in obj.values.tolist()]
    if isinstance(obj, (pd.Series, pd.Index)):
        return [canon(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): canon(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = list(obj) if not isinstance(obj, (set, frozenset)) else sorted(obj, key=str)
        return [canon(v) for v in items]
    return type(obj).__name__


def _entry_function(code: str, namespace: dict):
    names = [node.name for node in ast.parse(code).body
             if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef))]
    names = [n for n in names if callable(namespace.get(n))]
    if not names:
        return None
    for name in names:
        if name == "predict":
            return namespace[name]
    for name in names:
        if name.startswith("predict"):
            return namespace[name]
    return namespace[names[-1]]


def _call_entry(fn, frame: TracedFrame, schema: list[str]) -> tuple[object, set[str]]:
    """Invoke the entry callable per its signature convention.

    Returns (output, explicitly accessed columns). Schema-named parameters are
    fed per-row values; a single row-ish parameter gets per-row dicts carrying
    every column; any other single parameter receives the frame itself.
    """
    import inspect

    params = [p.name for p in inspect.signature(fn).parameters.values()
              if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
    norm = {p: _normalize(p) for p in params}
    schema_set = set(schema)

    if not params:
        return fn(), set()
    if all(norm[p] in schema_set for p in params):
        raw = {c: list(pd.DataFrame.__getitem__(frame, c).values) for c in schema}
        outputs = [fn(*[float(raw[norm[p]][i]) for p in params])
                   for i in range(len(frame))]
        return outputs, {norm[p] for p in params}
    if len(params) == 1 and params[0].lower() in ROW_PARAM_NAMES:
        raw = {c: list(pd.DataFrame.__getitem__(frame, c).values) for c in schema}
        rows = [{c: float(raw[c][i]) for c in schema} for i in range(len(frame))]
        return [fn(dict(row)) for row in rows], schema_set
    if len(params) == 1:
        return fn(frame), set()
    return None, set()


def _estimator_outputs(namespace: dict, frame: TracedFrame) -> dict:
    outputs = {}
    for var, obj in sorted(namespace.items()):
        if var.startswith("__") or not hasattr(obj, "predict"):
            continue
        feature_names = getattr(obj, "feature_names_in_", None)
        if feature_names is None:
            continue
        try:
            X_eval = frame[list(feature_names)]
            for method in ("predict_proba", "decision_function", "predict"):
                predictor = getattr(obj, method, None)
                if predictor is not None:
                    outputs[f"est:{var}"] = canon(predictor(X_eval))
                    break
        except Exception:
            continue
    return outputs


def run_once(code: str, schema: list[str], seed: int,
             perturb: str | None = None) -> tuple[dict, set[str]]:
    """One execution; returns (canonical output signature, accessed columns)."""
    frame = TracedFrame.build(schema, seed, perturb=perturb)
    patched = {name: getattr(pd, name, None) for name in PATCHED_READERS}
    namespace = {"__name__": "__probe__", "df": frame, "data": frame}
    extra_accessed: set[str] = set()
    outputs: dict = {}
    try:
        for name in PATCHED_READERS:
            setattr(pd, name, lambda *a, **k: frame)
        with contextlib.redirect_stdout(io.StringIO()):
            exec(compile(code, "<snippet>", "exec"), namespace)
            entry = _entry_function(code, namespace)
            if entry is not None:
                try:
                    result, accessed = _call_entry(entry, frame, schema)
                    extra_accessed |= accessed
                    if result is not None:
                        outputs["entry"] = canon(result)
                except Exception:
                    outputs["entry"] = "entry_call_failed"
            for name in RESULT_NAMES:
                if name in namespace:
                    outputs[f"var:{name}"] = canon(namespace[name])
            outputs.update(_estimator_outputs(namespace, frame))
    finally:
        for name, original in patched.items():
            if original is not None:
                setattr(pd, name, original)
    accessed_cols = (frame.accessed() | extra_accessed) & set(schema)
    return outputs, accessed_cols


def probe(code: str, schema: list[str], seed: int) -> ObservedInfluence:
    """Access recording plus perturbation probing; deterministic given inputs."""
    schema = [_normalize(s) for s in schema]
    try:
        baseline, accessed = run_once(code, schema, seed)
    except Exception:
        digest = traceback.format_exc().strip().splitlines()[-1]
        return ObservedInfluence(accessed_columns=(), perturbation_sensitive=(),
                                 exec_status="runtime_error", error=digest)
    sensitive = []
    for column in sorted(accessed):
        try:
            shifted, _ = run_once(code, schema, seed, perturb=column)
        except Exception:
            sensitive.append(column)  # behavior changed badly enough to raise
            continue
        if shifted != baseline:
            sensitive.append(column)
    return ObservedInfluence(accessed_columns=tuple(sorted(accessed)),
                             perturbation_sensitive=tuple(sensitive),
                             exec_status="ok")
