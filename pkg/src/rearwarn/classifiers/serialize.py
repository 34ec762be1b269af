"""Model serialization: versioned, line-oriented text format.

Layout:

    rearwarn-model 1
    # optional comment lines
    kind {tree|forest|knn|nb}
    param <name> <value>         (repeated)
    ... kind-specific records ...
    end

Tree node records are recursive preorder: `node <feature> <threshold> <w1> <w0>`
introduces an internal node whose left subtree follows immediately, then the
right subtree; `leaf <w1> <w0>` closes a branch. Floats are written with repr
so round-trips are exact on every stored numeric.
"""

from __future__ import annotations

import io
from typing import Sequence

import numpy as np

from ..exceptions import DataError
from .bayes import NaiveBayesModel
from .forest import ForestModel
from .knn import KnnModel
from .tree import TreeModel

FORMAT_ID = "rearwarn-model"
FORMAT_VERSION = 1


def _r(v) -> str:
    """Exact round-trip rendering of a float (plain Python repr)."""
    return repr(float(v))


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(s: str):
    if s == "true":
        return True
    if s == "false":
        return False
    if s == "none":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def _write_tree_nodes(out, tree: TreeModel, node: int = 0) -> None:
    if tree.is_leaf(node):
        out.write(f"leaf {_r(tree.warn_weight[node])} {_r(tree.safe_weight[node])}\n")
        return
    out.write(f"node {int(tree.feature[node])} {_r(tree.threshold[node])} "
              f"{_r(tree.warn_weight[node])} {_r(tree.safe_weight[node])}\n")
    _write_tree_nodes(out, tree, int(tree.left[node]))
    _write_tree_nodes(out, tree, int(tree.right[node]))


class _NodeReader:
    def __init__(self, lines: "_Lines"):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.w1: list[float] = []
        self.w0: list[float] = []
        self._lines = lines

    def read_subtree(self) -> int:
        lineno, parts = self._lines.next()
        idx = len(self.feature)
        if parts[0] == "leaf":
            if len(parts) != 3:
                raise DataError(f"line {lineno}: bad leaf record")
            self.feature.append(-1)
            self.threshold.append(0.0)
            self.left.append(-1)
            self.right.append(-1)
            self.w1.append(float(parts[1]))
            self.w0.append(float(parts[2]))
            return idx
        if parts[0] != "node":
            raise DataError(f"line {lineno}: expected node or leaf, got {parts[0]!r}")
        if len(parts) != 5:
            raise DataError(f"line {lineno}: bad node record")
        self.feature.append(int(parts[1]))
        self.threshold.append(float(parts[2]))
        self.left.append(-1)
        self.right.append(-1)
        self.w1.append(float(parts[3]))
        self.w0.append(float(parts[4]))
        self.left[idx] = self.read_subtree()
        self.right[idx] = self.read_subtree()
        return idx

    def to_tree(self, params: dict | None = None) -> TreeModel:
        return TreeModel(
            feature=np.array(self.feature, dtype=np.int16),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int32),
            right=np.array(self.right, dtype=np.int32),
            warn_weight=np.array(self.w1, dtype=np.float64),
            safe_weight=np.array(self.w0, dtype=np.float64),
            params=params or {},
        )


class _Lines:
    def __init__(self, text_iter):
        self._it = enumerate(text_iter, start=1)

    def next(self) -> tuple[int, list[str]]:
        for lineno, line in self._it:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            return lineno, line.split()
        raise DataError("unexpected end of model file")


def save_model(model, out, comments: Sequence[str] = ()) -> None:
    """Write any supported model to a text stream."""
    own = False
    if isinstance(out, (str, bytes)):
        out = open(out, "w", encoding="utf-8", newline="\n")
        own = True
    try:
        out.write(f"{FORMAT_ID} {FORMAT_VERSION}\n")
        for c in comments:
            out.write(f"# {c}\n")
        if isinstance(model, TreeModel):
            out.write("kind tree\n")
            for k, v in model.params.items():
                out.write(f"param {k} {_fmt_value(v)}\n")
            _write_tree_nodes(out, model)
        elif isinstance(model, ForestModel):
            out.write("kind forest\n")
            out.write(f"param n_trees {model.n_trees}\n")
            out.write(f"param features_per_split {model.features_per_split}\n")
            out.write(f"param bootstrap {_fmt_value(model.bootstrap)}\n")
            out.write(f"param seed {model.seed}\n")
            for k, v in model.params.items():
                out.write(f"param {k} {_fmt_value(v)}\n")
            for i, tree in enumerate(model.trees):
                out.write(f"tree {i}\n")
                _write_tree_nodes(out, tree)
        elif isinstance(model, KnnModel):
            out.write("kind knn\n")
            out.write(f"param k {model.k}\n")
            out.write("mins " + " ".join(_r(v) for v in model.mins) + "\n")
            out.write("ranges " + " ".join(_r(v) for v in model.ranges) + "\n")
            out.write(f"instances {len(model.y)}\n")
            for row, label, wt in zip(model.Xn, model.y, model.w):
                out.write(" ".join(_r(v) for v in row) + f" {int(label)} {_r(wt)}\n")
        elif isinstance(model, NaiveBayesModel):
            out.write("kind nb\n")
            out.write("log_prior " + " ".join(_r(v) for v in model.log_prior) + "\n")
            for cls in (0, 1):
                out.write(f"mean{cls} " + " ".join(_r(v) for v in model.mean[cls]) + "\n")
                out.write(f"var{cls} " + " ".join(_r(v) for v in model.var[cls]) + "\n")
        else:
            raise DataError(f"cannot serialize {type(model).__name__}")
        out.write("end\n")
    finally:
        if own:
            out.close()


def load_model(src):
    """Read a model written by save_model; returns the matching model object."""
    own = False
    if isinstance(src, (str, bytes)):
        src = open(src, "r", encoding="utf-8")
        own = True
    try:
        lines = _Lines(src)
        lineno, parts = lines.next()
        if len(parts) != 2 or parts[0] != FORMAT_ID:
            raise DataError(f"line {lineno}: not a {FORMAT_ID} file")
        if int(parts[1]) != FORMAT_VERSION:
            raise DataError(f"line {lineno}: unsupported format version {parts[1]}")
        lineno, parts = lines.next()
        if parts[0] != "kind" or len(parts) != 2:
            raise DataError(f"line {lineno}: expected kind record")
        kind = parts[1]

        params: dict = {}
        pending: tuple[int, list[str]] | None = None
        while True:
            lineno, parts = lines.next()
            if parts[0] == "param":
                params[parts[1]] = _parse_value(" ".join(parts[2:]))
            else:
                pending = (lineno, parts)
                break

        if kind == "tree":
            reader = _NodeReader(_PushbackLines(lines, pending))
            reader.read_subtree()
            _expect_end(lines)
            return reader.to_tree(params)
        if kind == "forest":
            n_trees = int(params.pop("n_trees"))
            fps = int(params.pop("features_per_split"))
            bootstrap = bool(params.pop("bootstrap"))
            seed = int(params.pop("seed"))
            trees = []
            push = _PushbackLines(lines, pending)
            for i in range(n_trees):
                lineno, parts = push.next()
                if parts[0] != "tree" or int(parts[1]) != i:
                    raise DataError(f"line {lineno}: expected tree {i}")
                reader = _NodeReader(push)
                reader.read_subtree()
                trees.append(reader.to_tree())
            _expect_end(push)
            return ForestModel(trees=trees, n_trees=n_trees, features_per_split=fps,
                               bootstrap=bootstrap, seed=seed, params=params)
        if kind == "knn":
            push = _PushbackLines(lines, pending)
            mins = _read_float_record(push, "mins", 5)
            ranges = _read_float_record(push, "ranges", 5)
            lineno, parts = push.next()
            if parts[0] != "instances":
                raise DataError(f"line {lineno}: expected instances record")
            n = int(parts[1])
            Xn = np.empty((n, 5))
            y = np.empty(n, dtype=np.int8)
            w = np.empty(n)
            for i in range(n):
                lineno, parts = push.next()
                if len(parts) != 7:
                    raise DataError(f"line {lineno}: bad knn instance record")
                Xn[i] = [float(p) for p in parts[:5]]
                y[i] = int(parts[5])
                w[i] = float(parts[6])
            _expect_end(push)
            return KnnModel(k=int(params["k"]), mins=mins, ranges=ranges, Xn=Xn, y=y, w=w)
        if kind == "nb":
            push = _PushbackLines(lines, pending)
            log_prior = _read_float_record(push, "log_prior", 2)
            mean = np.empty((2, 5))
            var = np.empty((2, 5))
            for cls in (0, 1):
                mean[cls] = _read_float_record(push, f"mean{cls}", 5)
                var[cls] = _read_float_record(push, f"var{cls}", 5)
            _expect_end(push)
            return NaiveBayesModel(log_prior=log_prior, mean=mean, var=var)
        raise DataError(f"unknown model kind {kind!r}")
    finally:
        if own:
            src.close()


class _PushbackLines:
    def __init__(self, lines: _Lines, pending):
        self._lines = lines
        self._pending = pending

    def next(self):
        if self._pending is not None:
            out, self._pending = self._pending, None
            return out
        return self._lines.next()


def _read_float_record(lines, name: str, n: int) -> np.ndarray:
    lineno, parts = lines.next()
    if parts[0] != name or len(parts) != n + 1:
        raise DataError(f"line {lineno}: expected {name} record with {n} values")
    return np.array([float(p) for p in parts[1:]], dtype=np.float64)


def _expect_end(lines) -> None:
    lineno, parts = lines.next()
    if parts[0] != "end":
        raise DataError(f"line {lineno}: expected end record")


def dumps_model(model, comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    save_model(model, buf, comments)
    return buf.getvalue()


def loads_model(text: str):
    return load_model(io.StringIO(text))
