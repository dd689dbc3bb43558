"""Instrumented pandas frame: records column reads and materializes unknown
columns on demand so snippets can reference their prediction target."""

from __future__ import annotations

import pandas as pd

from . import synth


class TracedFrame(pd.DataFrame):
    _metadata = ["_trace", "_synth_seed", "_schema_cols"]

    @property
    def _constructor(self):
        return TracedFrame

    @classmethod
    def build(cls, schema: list[str], seed: int,
              perturb: str | None = None) -> "TracedFrame":
        data = {}
        for name in schema:
            data[name] = synth.column_values(name, seed, perturbed=(name == perturb))
        frame = cls(data)
        frame._trace = set()
        frame._synth_seed = seed
        frame._schema_cols = list(schema)
        return frame

    # -- access recording ----------------------------------------------------

    def _record(self, key) -> None:
        trace = getattr(self, "_trace", None)
        if trace is None:
            return
        if isinstance(key, str):
            trace.add(key)
        elif isinstance(key, (list, tuple, set, pd.Index)):
            for k in key:
                if isinstance(k, str):
                    trace.add(k)

    def _materialize(self, key) -> None:
        seed = getattr(self, "_synth_seed", None)
        if seed is None:
            return
        names = [key] if isinstance(key, str) else \
            [k for k in key if isinstance(k, str)] if isinstance(key, (list, tuple)) else []
        for name in names:
            if name not in self.columns:
                full = synth.derived_values(name, self._schema_cols, seed)
                # align with this frame's rows (it may be a row-filtered slice)
                vals = [full[int(i) % len(full)] for i in self.index]
                super().__setitem__(name, vals)

    def __getitem__(self, key):
        self._materialize(key)
        self._record(key)
        return super().__getitem__(key)

    def get(self, key, default=None):
        self._materialize(key)
        self._record(key)
        return super().get(key, default)

    def drop(self, labels=None, *args, **kwargs):
        # vivify dropped names first so dropping the target never raises
        for candidate in (labels, kwargs.get("columns")):
            if candidate is not None:
                self._materialize(candidate if isinstance(candidate, (list, tuple))
                                  else [candidate] if isinstance(candidate, str)
                                  else list(candidate))
        return super().drop(labels, *args, **kwargs)

    def accessed(self) -> set[str]:
        return set(getattr(self, "_trace", set()))
