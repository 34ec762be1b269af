"""Rule extraction: one conjunctive rule per leaf of a decision tree.

Each rule's antecedent is the intersection of the path conditions, expressed
as one interval per feature with an exclusive lower bound and inclusive upper
bound, so the rules of a tree partition the feature space exactly as the tree
routes queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..features import FEATURE_NAMES, FEATURE_UNITS
from ..trajdata import ClassLabel
from .tree import TreeModel


@dataclass(frozen=True)
class Rule:
    intervals: tuple[tuple[float, float], ...]  # per feature: (lower, upper], +-inf open
    label: ClassLabel
    support_weight: float
    error_weight: float

    def matches(self, row) -> bool:
        return all(lo < x <= hi for (lo, hi), x in zip(self.intervals, row))


def extract_rules(tree: TreeModel) -> list[Rule]:
    """One rule per leaf; support is the leaf total weight, error the minority."""
    rules: list[Rule] = []

    def walk(node: int, lowers: list[float], uppers: list[float]) -> None:
        if tree.is_leaf(node):
            w1 = float(tree.warn_weight[node])
            w0 = float(tree.safe_weight[node])
            label = ClassLabel.WARNING if w1 >= w0 else ClassLabel.SAFE
            rules.append(Rule(
                intervals=tuple(zip(lowers, uppers)),
                label=label,
                support_weight=w1 + w0,
                error_weight=min(w1, w0),
            ))
            return
        f = int(tree.feature[node])
        t = float(tree.threshold[node])
        lo_save, hi_save = lowers[f], uppers[f]
        uppers[f] = min(uppers[f], t)
        walk(int(tree.left[node]), lowers, uppers)
        uppers[f] = hi_save
        lowers[f] = max(lowers[f], t)
        walk(int(tree.right[node]), lowers, uppers)
        lowers[f] = lo_save

    walk(0, [-math.inf] * 5, [math.inf] * 5)
    return rules


def _fmt(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return s if s not in ("-0", "") else "0"


def render_rule(rule: Rule) -> str:
    """Render in the If/Then style with units, e.g.
    If "Speed <= 73 km/h" & "TimeGap <= 1.5 s" Then "Warning with frequency=(320.26, 24.5)"
    """
    terms = []
    for (lo, hi), name, unit in zip(rule.intervals, FEATURE_NAMES, FEATURE_UNITS):
        if math.isinf(lo) and math.isinf(hi):
            continue
        if math.isinf(lo):
            terms.append(f'"{name} <= {_fmt(hi)} {unit}"')
        elif math.isinf(hi):
            terms.append(f'"{name} > {_fmt(lo)} {unit}"')
        else:
            terms.append(f'"{name} in [{_fmt(lo)},{_fmt(hi)}] {unit}"')
    antecedent = " & ".join(terms) if terms else '"always"'
    cls = "Warning" if rule.label == ClassLabel.WARNING else "Safe"
    if rule.error_weight > 0:
        freq = f"({_fmt(rule.support_weight)}, {_fmt(rule.error_weight)})"
    else:
        freq = _fmt(rule.support_weight)
    return f'If {antecedent} Then "{cls} with frequency={freq}"'
