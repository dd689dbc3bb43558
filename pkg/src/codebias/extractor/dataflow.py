"""Static influence analysis: which schema attributes reach a decision sink.

An attribute influences the prediction when a dataflow path connects an
occurrence of its normalized name (string literal in a column-selection
context, mapping key, or parameter name) to one of three sinks: the feature
operand of a fit/predict-style call, the condition of a branch whose arms
affect the returned value, or arithmetic contributing to a returned score.
Definitions killed on the way (column drops, list reassignment, column
overwrite) do not count.

The analysis is intra-procedural with one level of inlining into locally
defined helper functions. Flows it cannot resolve are treated as influencing
and the evidence is marked low-confidence: for a bias audit, false positives
are safer than false negatives.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..corpus import normalize_name

SINK_CONFIG_PATH = Path(__file__).parent.parent / "data" / "sink_heuristics.json"

SINK_FEATURE_MATRIX = "feature_matrix"
SINK_BRANCH_CONDITION = "branch_condition"
SINK_SCORE_ARITHMETIC = "score_arithmetic"

PARSE_OK = "ok"
PARSE_UNPARSEABLE = "unparseable"

MODE_STATIC = "static"
MODE_LLM_JUDGE = "llm_judge"

_INLINE_DEPTH_LIMIT = 2
_LOC_ATTRS = ("loc", "iloc", "at", "iat")


class SinkConfig:
    """Method-name heuristics for sink and frame recognition (data-driven)."""

    def __init__(self, raw: dict):
        self.fit_sinks = frozenset(raw["fit_sinks"])
        self.predict_sinks = frozenset(raw["predict_sinks"])
        self.sink_methods = self.fit_sinks | self.predict_sinks
        self.frame_readers = frozenset(raw["frame_readers"])
        self.frame_constructors = frozenset(raw["frame_constructors"])
        self.drop_methods = frozenset(raw["drop_methods"])
        self.filter_methods = frozenset(raw["filter_methods"])
        self.data_param_names = frozenset(raw["data_param_names"])

    @classmethod
    def load(cls, path=SINK_CONFIG_PATH) -> "SinkConfig":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))


_DEFAULT_SINKS: Optional[SinkConfig] = None


def default_sink_config() -> SinkConfig:
    global _DEFAULT_SINKS
    if _DEFAULT_SINKS is None:
        _DEFAULT_SINKS = SinkConfig.load()
    return _DEFAULT_SINKS


@dataclass(frozen=True)
class ParseResult:
    status: str  # ok | unparseable
    tree: Optional[ast.Module] = None
    error: Optional[str] = None
    error_line: Optional[int] = None
    truncated: bool = False  # trailing prose was cut to recover a parse


def parse_program(code: str) -> ParseResult:
    """Parse the snippet, trimming trailing unparseable lines (prose the fence
    extractor over-captured) when that recovers a nonempty program."""
    lines = code.splitlines()
    truncated = False
    first_error = None
    while True:
        source = "\n".join(lines)
        try:
            tree = ast.parse(source)
        except SyntaxError as exc:
            if first_error is None:
                first_error = exc
            cut = (exc.lineno or 1) - 1
            if 0 < cut < len(lines):
                lines = lines[:cut]
                truncated = True
                continue
            return ParseResult(status=PARSE_UNPARSEABLE,
                               error=f"{first_error.msg} (line {first_error.lineno})",
                               error_line=first_error.lineno)
        except (ValueError, RecursionError) as exc:
            return ParseResult(status=PARSE_UNPARSEABLE, error=str(exc), error_line=None)
        if not tree.body:
            return ParseResult(
                status=PARSE_UNPARSEABLE,
                error=(f"{first_error.msg} (line {first_error.lineno})"
                       if first_error else "empty program"),
                error_line=first_error.lineno if first_error else None)
        return ParseResult(status=PARSE_OK, tree=tree, truncated=truncated)


@dataclass(frozen=True)
class Evidence:
    line: int
    sink_kind: str
    low_confidence: bool = False


@dataclass
class InfluenceReport:
    sample_ref: str
    mode: str
    influencing: frozenset[str]
    evidence: dict[str, list[Evidence]]
    parse_status: str
    warnings: list[str] = field(default_factory=list)


# -- abstract values ---------------------------------------------------------

@dataclass(frozen=True)
class AVal:
    """Set of schema columns a value carries.

    low marks over-approximations; colist marks values known to be literal
    column-name lists; rows carries row-level taint (columns that decided
    which rows survive a boolean-mask filter), which survives later column
    selection and counts at sinks.
    """
    cols: frozenset[str] = frozenset()
    low: bool = False
    colist: bool = False
    rows: frozenset[str] = frozenset()

    @property
    def all_taint(self) -> frozenset[str]:
        return self.cols | self.rows


_EMPTY = AVal()

# builtins whose results carry no attribute taint worth tracking (len(df) in a
# branch condition must not taint the branch with every column)
_TAINT_FREE_FUNCS = frozenset(
    ["len", "range", "enumerate", "print", "type", "isinstance", "hasattr", "id"])


def _union(*vals: AVal) -> AVal:
    cols: set[str] = set()
    rows: set[str] = set()
    low = False
    colist = bool(vals)
    for v in vals:
        cols |= v.cols
        rows |= v.rows
        low = low or v.low
        colist = colist and v.colist
    return AVal(frozenset(cols), low, colist, frozenset(rows))


@dataclass
class BranchEvent:
    line: int
    test_val: AVal
    assigned: frozenset[str]
    has_return: bool


class _Collector:
    """Shared per-snippet analysis state."""

    def __init__(self, schema_norm: frozenset[str], sinks: SinkConfig):
        self.schema = schema_norm
        self.sinks = sinks
        self.full = AVal(schema_norm)
        self.sink_hits: list[tuple[str, int, str, bool]] = []
        self.branch_events: list[BranchEvent] = []
        self.def_edges: list[tuple[frozenset[str], frozenset[str]]] = []
        self.decision_roots: set[str] = set()
        self.derived_cols: dict[str, AVal] = {}
        self.warnings: list[str] = []

    def hit(self, val: AVal, line: int, kind: str) -> None:
        for attr in val.all_taint:
            self.sink_hits.append((attr, line, kind, val.low))


def _names_in(node: ast.AST) -> frozenset[str]:
    return frozenset(n.id for n in ast.walk(node) if isinstance(n, ast.Name))


def _assigned_names(stmts: Sequence[ast.stmt]) -> frozenset[str]:
    """Names (re)bound or mutated anywhere under the given statements."""
    out: set[str] = set()
    for stmt in stmts:
        for node in ast.walk(stmt):
            if isinstance(node, (ast.Assign, ast.AnnAssign, ast.AugAssign)):
                targets = node.targets if isinstance(node, ast.Assign) else [node.target]
                for t in targets:
                    for sub in ast.walk(t):
                        if isinstance(sub, ast.Name):
                            out.add(sub.id)
            elif isinstance(node, ast.Call) and isinstance(node.func, ast.Attribute):
                base = node.func.value
                if isinstance(base, ast.Name):
                    out.add(base.id)
    return frozenset(out)


def _has_return(stmts: Sequence[ast.stmt]) -> bool:
    return any(isinstance(n, ast.Return) for stmt in stmts for n in ast.walk(stmt))


class _FrameSim:
    """Abstract interpreter for one frame (module body or function body)."""

    def __init__(self, coll: _Collector, helpers: dict[str, ast.FunctionDef],
                 env: Optional[dict[str, AVal]] = None, depth: int = 0,
                 register_return_sinks: bool = False):
        self.coll = coll
        self.helpers = dict(helpers)
        self.env = env if env is not None else {}
        self.depth = depth
        self.register_return_sinks = register_return_sinks
        self.return_vals: list[AVal] = []

    # -- statements ---------------------------------------------------------

    def run(self, stmts: Sequence[ast.stmt]) -> None:
        for stmt in stmts:
            self.stmt(stmt)

    def stmt(self, stmt: ast.stmt) -> None:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            self.helpers[stmt.name] = stmt
        elif isinstance(stmt, ast.Return):
            val = self.eval(stmt.value) if stmt.value is not None else _EMPTY
            self.return_vals.append(val)
            if stmt.value is not None:
                self.coll.decision_roots |= _names_in(stmt.value)
                if self.register_return_sinks:
                    self.coll.hit(val, stmt.lineno, SINK_SCORE_ARITHMETIC)
        elif isinstance(stmt, ast.Assign):
            self._assign(stmt.targets, stmt.value)
        elif isinstance(stmt, ast.AnnAssign):
            if stmt.value is not None:
                self._assign([stmt.target], stmt.value)
        elif isinstance(stmt, ast.AugAssign):
            val = _union(self.eval_target_current(stmt.target), self.eval(stmt.value))
            self._bind_target(stmt.target, val, augment=True)
            self._edge(stmt.target, stmt.value, include_target_use=True)
        elif isinstance(stmt, ast.Expr):
            self._expr_stmt(stmt.value)
        elif isinstance(stmt, ast.If):
            self._branch(stmt)
        elif isinstance(stmt, ast.While):
            self._loop(stmt.body, stmt.orelse, test=stmt.test, line=stmt.lineno)
        elif isinstance(stmt, ast.For):
            elem = self.eval(stmt.iter)
            self._bind_target(stmt.target, elem)
            self.coll.def_edges.append((_names_in(stmt.target), _names_in(stmt.iter)))
            self._loop(stmt.body, stmt.orelse)
        elif isinstance(stmt, ast.With):
            for item in stmt.items:
                val = self.eval(item.context_expr)
                if item.optional_vars is not None:
                    self._bind_target(item.optional_vars, val)
            self.run(stmt.body)
        elif isinstance(stmt, ast.Try):
            self.run(stmt.body)
            for handler in stmt.handlers:
                self.run(handler.body)
            self.run(stmt.orelse)
            self.run(stmt.finalbody)
        elif isinstance(stmt, ast.Delete):
            for target in stmt.targets:
                self._delete(target)
        elif isinstance(stmt, ast.Assert):
            self.eval(stmt.test)
        # imports, pass, break, continue, global, raise: no dataflow

    def _assign(self, targets: Sequence[ast.expr], value: ast.expr) -> None:
        val = self.eval(value)
        for target in targets:
            if isinstance(target, (ast.Tuple, ast.List)):
                src = value.elts if isinstance(value, (ast.Tuple, ast.List)) and \
                    len(value.elts) == len(target.elts) else None
                for i, sub in enumerate(target.elts):
                    self._bind_target(sub, self.eval(src[i]) if src else val)
            else:
                self._bind_target(target, val)
        for target in targets:
            self.coll.def_edges.append((_names_in(target), _names_in(value)))

    def _bind_target(self, target: ast.expr, val: AVal, augment: bool = False) -> None:
        if isinstance(target, ast.Name):
            if augment:
                val = _union(self.env.get(target.id, _EMPTY), val)
            self.env[target.id] = val
        elif isinstance(target, ast.Subscript):
            key = _literal_str(target.slice)
            base_val = self.eval(target.value)
            if key is not None:
                # column store: later selections of `key` resolve to this value
                self.coll.derived_cols[normalize_name(key)] = val
            if isinstance(target.value, ast.Name):
                self.env[target.value.id] = _union(base_val, val)
        elif isinstance(target, ast.Attribute):
            if isinstance(target.value, ast.Name):
                base = self.env.get(target.value.id, _EMPTY)
                self.env[target.value.id] = _union(base, val)
        elif isinstance(target, (ast.Tuple, ast.List)):
            for sub in target.elts:
                self._bind_target(sub, val)
        elif isinstance(target, ast.Starred):
            self._bind_target(target.value, val)

    def eval_target_current(self, target: ast.expr) -> AVal:
        if isinstance(target, ast.Name):
            return self.env.get(target.id, _EMPTY)
        return self.eval(target)

    def _edge(self, target: ast.expr, value: ast.expr, include_target_use: bool = False) -> None:
        uses = _names_in(value)
        if include_target_use:
            uses |= _names_in(target)
        self.coll.def_edges.append((_names_in(target), uses))

    def _expr_stmt(self, value: ast.expr) -> None:
        if isinstance(value, ast.Call) and isinstance(value.func, ast.Attribute):
            call, method = value, value.func.attr.lower()
            base = call.func.value
            if isinstance(base, ast.Name):
                base_name = base.id
                if method == "remove" and call.args and _literal_str(call.args[0]) is not None:
                    cur = self.env.get(base_name, _EMPTY)
                    gone = normalize_name(_literal_str(call.args[0]))
                    self.env[base_name] = AVal(cur.cols - {gone}, cur.low, cur.colist,
                                                cur.rows)
                    self.eval_call(call, skip_arg_taint=True)
                    return
                if method in ("append", "extend", "insert", "add", "update"):
                    arg_vals = [self.eval(a) for a in call.args]
                    args_val = _union(*arg_vals) if arg_vals else _EMPTY
                    cur = self.env.get(base_name, _EMPTY)
                    # appending literal names keeps a column list a column list
                    still_colist = cur.colist and all(
                        v.colist or (isinstance(a, ast.Constant)
                                     and isinstance(a.value, (str, int)))
                        for a, v in zip(call.args, arg_vals))
                    merged = _union(cur, args_val)
                    self.env[base_name] = AVal(merged.cols, merged.low, still_colist,
                                               merged.rows)
                    self.coll.def_edges.append((frozenset([base_name]),
                                                _names_in(call) | {base_name}))
                    return
                if method in self.coll.sinks.drop_methods and _kw_true(call, "inplace"):
                    self.env[base_name] = self.eval_call(call)
                    return
                if method in self.coll.sinks.sink_methods:
                    result = self.eval_call(call)
                    self.env[base_name] = result
                    return
        self.eval(value)

    def _delete(self, target: ast.expr) -> None:
        if isinstance(target, ast.Subscript):
            key = _literal_str(target.slice)
            if key is not None:
                norm = normalize_name(key)
                self.coll.derived_cols[norm] = _EMPTY
                if isinstance(target.value, ast.Name):
                    cur = self.env.get(target.value.id, _EMPTY)
                    self.env[target.value.id] = AVal(cur.cols - {norm}, cur.low, cur.colist,
                                                     cur.rows)
        elif isinstance(target, ast.Name):
            self.env.pop(target.id, None)

    def _branch(self, stmt: ast.If) -> None:
        test_val = self.eval(stmt.test)
        self.coll.branch_events.append(BranchEvent(
            line=stmt.lineno,
            test_val=test_val,
            assigned=_assigned_names(stmt.body) | _assigned_names(stmt.orelse),
            has_return=_has_return(stmt.body) or _has_return(stmt.orelse),
        ))
        before = dict(self.env)
        self.run(stmt.body)
        after_body = self.env
        self.env = dict(before)
        self.run(stmt.orelse)
        after_else = self.env
        merged: dict[str, AVal] = {}
        for key in set(after_body) | set(after_else) | set(before):
            merged[key] = _union(after_body.get(key, before.get(key, _EMPTY)),
                                 after_else.get(key, before.get(key, _EMPTY)))
        self.env = merged

    def _loop(self, body: Sequence[ast.stmt], orelse: Sequence[ast.stmt],
              test: Optional[ast.expr] = None, line: Optional[int] = None) -> None:
        if test is not None:
            self.coll.branch_events.append(BranchEvent(
                line=line, test_val=self.eval(test),
                assigned=_assigned_names(body), has_return=_has_return(body)))
        # two passes approximate the loop fixpoint; merge keeps the zero-trip case
        for _ in range(2):
            before = dict(self.env)
            self.run(body)
            for key in set(self.env) | set(before):
                self.env[key] = _union(self.env.get(key, _EMPTY), before.get(key, _EMPTY))
        self.run(orelse)

    # -- expressions ---------------------------------------------------------

    def eval(self, node: Optional[ast.expr]) -> AVal:
        if node is None:
            return _EMPTY
        if isinstance(node, ast.Constant):
            if isinstance(node.value, str):
                return self._resolve_column(node.value)
            return _EMPTY
        if isinstance(node, ast.Name):
            return self.env.get(node.id, _EMPTY)
        if isinstance(node, ast.Attribute):
            norm = normalize_name(node.attr)
            if norm in self.coll.schema:
                return AVal(frozenset([norm]))
            return self.eval(node.value)
        if isinstance(node, ast.Subscript):
            return self._subscript(node)
        if isinstance(node, ast.Call):
            return self.eval_call(node)
        if isinstance(node, (ast.List, ast.Tuple, ast.Set)):
            vals = [self.eval(e) for e in node.elts]
            colist = bool(node.elts) and all(
                isinstance(e, ast.Constant) and isinstance(e.value, str) for e in node.elts)
            merged = _union(*vals) if vals else _EMPTY
            return AVal(merged.cols, merged.low, colist, merged.rows)
        if isinstance(node, ast.Dict):
            parts = []
            str_keys = bool(node.keys)
            for key in node.keys:
                if key is not None and isinstance(key, ast.Constant) and isinstance(key.value, str):
                    parts.append(self._resolve_column(key.value))
                else:
                    str_keys = False
            parts.extend(self.eval(v) for v in node.values)
            merged = _union(*parts) if parts else _EMPTY
            # string-keyed dicts behave like column lists under .keys()/.items()
            return AVal(merged.cols, merged.low, str_keys, merged.rows)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Add):
            left, right = self.eval(node.left), self.eval(node.right)
            if left.colist and right.colist:
                return AVal(left.cols | right.cols, left.low or right.low, True,
                            left.rows | right.rows)
            return _union(left, right)
        if isinstance(node, ast.IfExp):
            test = self.eval(node.test)
            self.coll.branch_events.append(BranchEvent(
                line=node.lineno, test_val=test, assigned=frozenset(), has_return=False))
            return _union(test, self.eval(node.body), self.eval(node.orelse))
        if isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp, ast.DictComp)):
            resolved = self._filtered_columns_comp(node)
            if resolved is not None:
                return resolved
            parts = []
            filtered = False
            for gen in node.generators:
                parts.append(self.eval(gen.iter))
                if gen.ifs:
                    filtered = True
            if isinstance(node, ast.DictComp):
                parts.extend([self.eval(node.key), self.eval(node.value)])
            else:
                parts.append(self.eval(node.elt))
            merged = _union(*parts) if parts else _EMPTY
            return AVal(merged.cols, merged.low or filtered, rows=merged.rows)
        if isinstance(node, ast.Lambda):
            return _EMPTY
        if isinstance(node, ast.NamedExpr):
            val = self.eval(node.value)
            self._bind_target(node.target, val)
            return val
        if isinstance(node, ast.Starred):
            return self.eval(node.value)
        # generic fold: BinOp, BoolOp, Compare, UnaryOp, JoinedStr, ...
        parts = [self.eval(child) for child in ast.iter_child_nodes(node)
                 if isinstance(child, ast.expr)]
        return _union(*parts) if parts else _EMPTY

    def _resolve_column(self, name: str) -> AVal:
        norm = normalize_name(name)
        if norm in self.coll.derived_cols:
            return self.coll.derived_cols[norm]
        if norm in self.coll.schema:
            return AVal(frozenset([norm]))
        return _EMPTY

    def _filtered_columns_comp(self, node) -> Optional[AVal]:
        """Resolve the set-subtraction idiom
        ``[c for c in df.columns if c not in (...)]`` to an exact column list."""
        if isinstance(node, ast.DictComp) or len(node.generators) != 1:
            return None
        gen = node.generators[0]
        if not isinstance(gen.target, ast.Name):
            return None
        elt = getattr(node, "elt", None)
        if not isinstance(elt, ast.Name) or elt.id != gen.target.id:
            return None
        base = self.eval(gen.iter)
        if not base.cols:
            return None
        excluded: set[str] = set()
        for cond in gen.ifs:
            sub = _excluded_names(cond, gen.target.id)
            if sub is None:
                return None
            excluded |= sub
        gone = {normalize_name(e) for e in excluded}
        return AVal(base.cols - gone, base.low, colist=True, rows=base.rows)

    def _subscript(self, node: ast.Subscript) -> AVal:
        base_val = self.eval(node.value)
        sel = node.slice
        if isinstance(node.value, ast.Attribute) and node.value.attr in _LOC_ATTRS \
                and isinstance(sel, ast.Tuple) and len(sel.elts) == 2:
            rows, cols = sel.elts
            return _union(self._selector(cols, base_val), self.eval(rows))
        return self._selector(sel, base_val)

    def _select(self, picked: AVal, base_val: AVal) -> AVal:
        """Column selection keeps the base's row-level taint."""
        return AVal(picked.cols, picked.low or base_val.low, picked.colist,
                    picked.rows | base_val.rows)

    def _row_filter(self, base_val: AVal, mask: AVal) -> AVal:
        """Boolean-mask subscript: columns unchanged, mask taints the rows."""
        return AVal(base_val.cols, base_val.low or mask.low, base_val.colist,
                    base_val.rows | mask.cols | mask.rows)

    def _selector(self, sel: ast.expr, base_val: AVal) -> AVal:
        if isinstance(sel, ast.Constant):
            if isinstance(sel.value, str):
                return self._select(self._resolve_column(sel.value), base_val)
            return base_val  # positional indexing keeps the container's taint
        if isinstance(sel, (ast.List, ast.Tuple, ast.Set)):
            if all(isinstance(e, ast.Constant) and isinstance(e.value, str) for e in sel.elts):
                vals = [self._resolve_column(e.value) for e in sel.elts]
                picked = _union(*vals) if vals else _EMPTY
                return self._select(picked, base_val)
            return _union(base_val, self.eval(sel))
        if isinstance(sel, ast.Slice):
            return base_val
        if isinstance(sel, ast.Name):
            val = self.env.get(sel.id, _EMPTY)
            if val.colist:
                return self._select(val, base_val)
            if val.cols or val.rows:
                # non-literal variable: treat as a boolean mask (row filter)
                return self._row_filter(base_val, val)
            return AVal(base_val.cols, low=True, rows=base_val.rows) \
                if base_val.cols else _EMPTY
        dyn = self.eval(sel)
        if dyn.colist:
            return self._select(dyn, base_val)  # e.g. df[cols_a + cols_b]
        if isinstance(sel, (ast.Compare, ast.BoolOp, ast.BinOp, ast.UnaryOp)):
            return self._row_filter(base_val, dyn)
        # dynamic selector we cannot resolve: conservative
        merged = _union(base_val, dyn)
        return AVal(merged.cols, low=True, rows=merged.rows)

    # -- calls ----------------------------------------------------------------

    def eval_call(self, call: ast.Call, skip_arg_taint: bool = False) -> AVal:
        arg_vals = [] if skip_arg_taint else \
            [self.eval(a) for a in call.args] + [self.eval(kw.value) for kw in call.keywords]
        args_union = _union(*arg_vals) if arg_vals else _EMPTY

        func = call.func
        if isinstance(func, ast.Attribute):
            method = func.attr.lower()
            base_val = self.eval(func.value)
            sinks = self.coll.sinks
            if method in sinks.drop_methods:
                return self._drop(call, base_val)
            if method in sinks.filter_methods:
                items = _kw(call, "items")
                if items is not None:
                    return self._selector(items, base_val)
                return _union(base_val, args_union)
            if method in sinks.frame_readers:
                return self.coll.full
            if method in sinks.frame_constructors:
                if not call.args and not call.keywords:
                    return _EMPTY
                if args_union.cols:
                    return args_union
                return AVal(self.coll.full.cols, low=True)
            if method in sinks.sink_methods:
                self.coll.hit(args_union, call.lineno, SINK_FEATURE_MATRIX)
                self.coll.decision_roots |= _names_in(call)
                if isinstance(func.value, ast.Name):
                    self.coll.def_edges.append((frozenset([func.value.id]),
                                                _names_in(call) | {func.value.id}))
                return _union(base_val, args_union)
            if method == "get" and call.args and _literal_str(call.args[0]) is not None:
                default = _union(*(self.eval(a) for a in call.args[1:])) if call.args[1:] else _EMPTY
                return _union(self._resolve_column(_literal_str(call.args[0])), default)
            if method in ("keys", "items", "copy", "tolist", "to_list") and not call.args:
                return base_val  # preserves colist through common conversions
            return _union(base_val, args_union)

        if isinstance(func, ast.Name):
            fname = func.id
            flow = fname.lower()
            if flow in _TAINT_FREE_FUNCS:
                return _EMPTY
            if fname in self.helpers and self.depth < _INLINE_DEPTH_LIMIT:
                return self._inline(self.helpers[fname], call)
            if flow in self.coll.sinks.frame_readers:
                return self.coll.full
            if flow in self.coll.sinks.sink_methods:
                self.coll.hit(args_union, call.lineno, SINK_FEATURE_MATRIX)
                self.coll.decision_roots |= _names_in(call)
                return args_union
            return args_union

        return _union(self.eval(func), args_union)

    def _drop(self, call: ast.Call, base_val: AVal) -> AVal:
        """pandas .drop: remove resolvable dropped columns from the frame's set.

        Unresolvable drops keep the columns (not killing is the safe
        over-approximation)."""
        dropped_node = _kw(call, "columns")
        axis = _kw(call, "axis")
        axis_is_cols = axis is not None and (
            (isinstance(axis, ast.Constant) and axis.value in (1, "columns")))
        if dropped_node is None:
            labels = _kw(call, "labels")
            if labels is not None and axis_is_cols:
                dropped_node = labels
            elif call.args and axis_is_cols:
                dropped_node = call.args[0]
        if dropped_node is None:
            return base_val  # row drop or unresolvable axis
        dropped = _literal_str_set(dropped_node)
        if dropped is None:
            val = self.env.get(dropped_node.id, _EMPTY) \
                if isinstance(dropped_node, ast.Name) else _EMPTY
            if val.colist:
                dropped = set(val.cols)
            else:
                return base_val
        gone = {normalize_name(d) for d in dropped}
        for norm in gone:
            self.coll.derived_cols[norm] = _EMPTY
        return AVal(base_val.cols - gone, base_val.low, base_val.colist, base_val.rows)

    def _inline(self, fn: ast.FunctionDef, call: ast.Call) -> AVal:
        """One-level simulation of a locally defined helper."""
        params = [a.arg for a in fn.args.args]
        env: dict[str, AVal] = {}
        for i, arg in enumerate(call.args):
            if i < len(params):
                env[params[i]] = self.eval(arg)
        for kw in call.keywords:
            if kw.arg in params:
                env[kw.arg] = self.eval(kw.value)
        child = _FrameSim(self.coll, self.helpers, env=env, depth=self.depth + 1,
                          register_return_sinks=False)
        child.run(fn.body)
        self.coll.def_edges.append((frozenset(), _names_in(call)))
        return _union(*child.return_vals) if child.return_vals else _EMPTY


def _literal_str(node: ast.expr) -> Optional[str]:
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return node.value
    return None


def _literal_str_set(node: ast.expr) -> Optional[set[str]]:
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return {node.value}
    if isinstance(node, (ast.List, ast.Tuple, ast.Set)):
        out = set()
        for e in node.elts:
            s = _literal_str(e)
            if s is None:
                return None
            out.add(s)
        return out
    return None


def _excluded_names(cond: ast.expr, var: str) -> Optional[set[str]]:
    """Literal names excluded by a comprehension filter on `var`, or None when
    the condition is not a recognizable exclusion."""
    if isinstance(cond, ast.BoolOp) and isinstance(cond.op, ast.And):
        total: set[str] = set()
        for part in cond.values:
            sub = _excluded_names(part, var)
            if sub is None:
                return None
            total |= sub
        return total
    if isinstance(cond, ast.Compare) and len(cond.ops) == 1 \
            and isinstance(cond.left, ast.Name) and cond.left.id == var:
        op, comp = cond.ops[0], cond.comparators[0]
        if isinstance(op, ast.NotEq):
            s = _literal_str(comp)
            return {s} if s is not None else None
        if isinstance(op, ast.NotIn):
            return _literal_str_set(comp)
    return None


def _kw(call: ast.Call, name: str) -> Optional[ast.expr]:
    for kw in call.keywords:
        if kw.arg == name:
            return kw.value
    return None


def _kw_true(call: ast.Call, name: str) -> bool:
    node = _kw(call, name)
    return isinstance(node, ast.Constant) and node.value is True


def _seed_param_env(fn: ast.FunctionDef, coll: _Collector) -> dict[str, AVal]:
    """Parameter sources for a standalone entry function: schema-named params
    carry themselves; the single-parameter or conventionally named data
    parameter carries the full schema."""
    params = [a.arg for a in fn.args.args]
    env: dict[str, AVal] = {}
    for p in params:
        norm = normalize_name(p)
        if norm in coll.schema:
            env[p] = AVal(frozenset([norm]))
        elif p.lower() in coll.sinks.data_param_names or p.lower().endswith("_df"):
            env[p] = coll.full
    if len(params) == 1 and params[0] not in env:
        env[params[0]] = coll.full
    return env


def influenced_attributes(tree: ast.Module, schema: Sequence[str],
                          prediction_target: Optional[str] = None,
                          sample_ref: str = "", sink_config: Optional[SinkConfig] = None,
                          extra_warnings: Optional[list[str]] = None) -> InfluenceReport:
    """Run the static influence analysis over a parsed snippet.

    schema: attribute names the report may contain (anything else is
    discarded). prediction_target never counts as influencing even when it
    appears in the feature matrix.
    """
    sinks = sink_config or default_sink_config()
    schema_norm = frozenset(normalize_name(s) for s in schema)
    coll = _Collector(schema_norm, sinks)

    helpers = {s.name: s for s in tree.body
               if isinstance(s, (ast.FunctionDef, ast.AsyncFunctionDef))}
    called = {n.func.id for n in ast.walk(tree)
              if isinstance(n, ast.Call) and isinstance(n.func, ast.Name)}

    module_frame = _FrameSim(coll, helpers, register_return_sinks=False)
    module_frame.run(tree.body)

    for name, fn in helpers.items():
        if name in called:
            continue  # covered by inlining at its call sites
        frame = _FrameSim(coll, helpers, env=_seed_param_env(fn, coll),
                          register_return_sinks=True)
        frame.run(fn.body)

    # branch conditions count when an arm returns or assigns something the
    # decision (a return value or a sink operand) depends on
    deps = set(coll.decision_roots)
    changed = True
    while changed:
        changed = False
        for targets, uses in coll.def_edges:
            if targets & deps and not uses <= deps:
                deps |= uses
                changed = True

    evidence: dict[str, list[Evidence]] = {}

    def add(attr: str, line: int, kind: str, low: bool) -> None:
        ev = Evidence(line=line or 0, sink_kind=kind, low_confidence=low)
        bucket = evidence.setdefault(attr, [])
        if ev not in bucket:
            bucket.append(ev)

    for attr, line, kind, low in coll.sink_hits:
        add(attr, line, kind, low)
    for event in coll.branch_events:
        if not event.test_val.all_taint:
            continue
        if event.has_return or (event.assigned & deps):
            for attr in event.test_val.all_taint:
                add(attr, event.line, SINK_BRANCH_CONDITION, event.test_val.low)

    target_norm = normalize_name(prediction_target) if prediction_target else None
    influencing = {a for a in evidence if a in schema_norm and a != target_norm}
    evidence = {a: sorted(evidence[a], key=lambda e: (e.line, e.sink_kind))
                for a in sorted(influencing)}

    warnings = list(extra_warnings or [])
    return InfluenceReport(
        sample_ref=sample_ref,
        mode=MODE_STATIC,
        influencing=frozenset(influencing),
        evidence=evidence,
        parse_status=PARSE_OK,
        warnings=warnings,
    )


def unparseable_report(sample_ref: str, mode: str, error: Optional[str]) -> InfluenceReport:
    """Empty report for samples routed to the error tally."""
    return InfluenceReport(
        sample_ref=sample_ref,
        mode=mode,
        influencing=frozenset(),
        evidence={},
        parse_status=PARSE_UNPARSEABLE,
        warnings=[error] if error else [],
    )


def analyze_code(code: str, schema: Sequence[str],
                 prediction_target: Optional[str] = None, sample_ref: str = "",
                 sink_config: Optional[SinkConfig] = None) -> InfluenceReport:
    """parse_program + influenced_attributes in one step."""
    parsed = parse_program(code)
    if parsed.status != PARSE_OK:
        return unparseable_report(sample_ref, MODE_STATIC, parsed.error)
    extra = ["trailing non-code lines dropped before parsing"] if parsed.truncated else []
    return influenced_attributes(parsed.tree, schema, prediction_target=prediction_target,
                                 sample_ref=sample_ref, sink_config=sink_config,
                                 extra_warnings=extra)
