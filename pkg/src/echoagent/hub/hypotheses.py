"""Hypothesis sets, criteria threshold rules, and posterior scoring.

The posterior over hypotheses is proportional to prior times a log-linear
likelihood over the graph's supports/contradicts edges:

    loglik(h) = sum_supports w * log(1 + beta) + sum_contradicts w * log(1 - gamma)

which is monotone in support, penalizes contradiction, reduces to the
prior on an empty graph, and is invariant to rescaling all likelihoods by
a positive constant.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from ..quant.grading import GRADES, normalize_grade_label
from .graph import ReasoningGraph

_NUMBER = r"(\d+(?:\.\d+)?)"

# comparator phrase -> operator(s); checked in order, first hit wins
_COMPARATOR_PATTERNS: tuple[tuple[str, tuple[str, ...]], ...] = (
    (rf"between\s+{_NUMBER}\s*%?\s+and\s+{_NUMBER}", (">=", "<")),
    (rf"{_NUMBER}\s*(?:%|mm2|mm²|ml|mm)?\s+or\s+(?:higher|greater|above|more)", (">=",)),
    (rf"{_NUMBER}\s*(?:%|mm2|mm²|ml|mm)?\s+or\s+(?:lower|less|below)", ("<=",)),
    (rf"at\s+least\s+{_NUMBER}", (">=",)),
    (rf"at\s+most\s+{_NUMBER}", ("<=",)),
    (rf"(?:below|under|less\s+than)\s+{_NUMBER}", ("<",)),
    (rf"(?:above|over|greater\s+than|more\s+than|exceed(?:s|ing)?)\s+{_NUMBER}", (">",)),
)

_METRIC_PATTERNS: tuple[tuple[str, str], ...] = (
    (r"\bejection fraction\b|\bef\b", "ef_percent"),
    (r"\barea\b", "area_mm2"),
    (r"\bvolume\b", "volume_ml"),
    (r"\bdiameter\b|\bdimension\b", "dimension_mm"),
)

_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")
_INDICATES_RE = re.compile(r"indicates?\s+(?:an?\s+)?(.+?)\s*$")


@dataclass(frozen=True)
class ThresholdRule:
    metric: str
    conditions: tuple[tuple[str, float], ...]
    label: str
    source_text: str

    def satisfied(self, value: float) -> bool:
        for op, threshold in self.conditions:
            if op == ">=" and not value >= threshold:
                return False
            if op == ">" and not value > threshold:
                return False
            if op == "<" and not value < threshold:
                return False
            if op == "<=" and not value <= threshold:
                return False
        return True


def parse_criteria(items: list[str]) -> list[ThresholdRule]:
    """Extract (metric, comparator, threshold, label) rules from prose.

    Works sentence by sentence; the hypothesis label is the phrase after
    "indicates", normalized onto a canonical grade name when it names one.
    """
    rules: list[ThresholdRule] = []
    for item in items:
        for sentence in _SENTENCE_RE.split(item):
            sentence = sentence.strip()
            if not sentence:
                continue
            lowered = sentence.lower()
            metric = None
            for pattern, name in _METRIC_PATTERNS:
                if re.search(pattern, lowered):
                    metric = name
                    break
            if metric is None:
                continue
            conditions: tuple[tuple[str, float], ...] | None = None
            for pattern, ops in _COMPARATOR_PATTERNS:
                match = re.search(pattern, lowered)
                if match:
                    values = [float(g) for g in match.groups()]
                    conditions = tuple(zip(ops, values))
                    break
            if conditions is None:
                continue
            label_match = _INDICATES_RE.search(sentence.rstrip(". "))
            label = label_match.group(1).strip() if label_match else sentence
            canonical = normalize_grade_label(label)
            rules.append(
                ThresholdRule(
                    metric=metric,
                    conditions=conditions,
                    label=canonical or label,
                    source_text=sentence,
                )
            )
    return rules


@dataclass
class HypothesisSet:
    labels: tuple[str, ...]
    prior: np.ndarray

    def __post_init__(self):
        if not self.labels:
            raise ValueError("hypothesis set cannot be empty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate hypothesis labels: {self.labels}")
        self.prior = np.asarray(self.prior, dtype=np.float64)
        if self.prior.shape != (len(self.labels),):
            raise ValueError("prior length does not match hypothesis count")
        if np.any(self.prior < 0) or abs(float(self.prior.sum()) - 1.0) > 1e-9:
            raise ValueError("prior must be a probability vector")

    @classmethod
    def uniform(cls, labels: tuple[str, ...]) -> "HypothesisSet":
        if not labels:
            raise ValueError("hypothesis set cannot be empty")
        n = len(labels)
        return cls(labels=tuple(labels), prior=np.full(n, 1.0 / n))


def hypothesis_labels(options: tuple[str, ...] | None, rules: list[ThresholdRule],
                      criteria_items: list[str]) -> tuple[str, ...]:
    """Multiple-choice options win; otherwise rule labels; otherwise the
    criteria items themselves. Pure grade sets come out in severity order."""
    if options:
        return tuple(options)
    labels: list[str] = []
    for rule in rules:
        if rule.label not in labels:
            labels.append(rule.label)
    if labels:
        if all(label in GRADES for label in labels):
            return tuple(g for g in GRADES if g in labels)
        return tuple(labels)
    if criteria_items:
        return tuple(dict.fromkeys(criteria_items))
    return ("no guidance found",)


def labels_match(rule_label: str, hypothesis_label: str) -> bool:
    """A rule targets a hypothesis when they normalize to the same grade or
    one phrase contains the other (case-insensitive)."""
    rule_grade = normalize_grade_label(rule_label)
    hyp_grade = normalize_grade_label(hypothesis_label)
    if rule_grade is not None and hyp_grade is not None:
        return rule_grade == hyp_grade
    a = rule_label.strip().lower()
    b = hypothesis_label.strip().lower()
    return a in b or b in a


def update_posteriors(
    graph: ReasoningGraph,
    hypothesis_nodes: dict[str, str],
    labels: tuple[str, ...],
    prior: np.ndarray,
    beta: float = 1.0,
    gamma: float = 0.8,
) -> tuple[np.ndarray, bool]:
    """Posterior vector over hypotheses, plus a numerical-degeneracy flag.

    Supports/contradicts edges are counted symmetrically: an edge touches a
    hypothesis whichever direction it was stored in.
    """
    support_term = math.log(1.0 + beta)
    contradict_term = math.log(1.0 - gamma)
    loglik = np.zeros(len(labels), dtype=np.float64)
    for i, label in enumerate(labels):
        node_id = hypothesis_nodes[label]
        for edge in graph.edges_touching(node_id, ("supports", "contradicts")):
            term = support_term if edge.kind == "supports" else contradict_term
            loglik[i] += edge.weight * term
    shifted = loglik - loglik.max()
    weights = np.asarray(prior, dtype=np.float64) * np.exp(shifted)
    total = float(weights.sum())
    if not math.isfinite(total) or total <= 0.0:
        return np.asarray(prior, dtype=np.float64).copy(), True
    return weights / total, False


def normalized_entropy(posterior: np.ndarray) -> float:
    """Shannon entropy scaled to [0, 1] by log(n); 0 for a single hypothesis."""
    p = np.asarray(posterior, dtype=np.float64)
    if p.size <= 1:
        return 0.0
    nonzero = p[p > 0]
    entropy = float(-(nonzero * np.log(nonzero)).sum())
    return entropy / math.log(p.size)
