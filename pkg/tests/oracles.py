"""Independent brute-force reference implementations used by the tests.

These deliberately avoid the production code paths: cosines via python
loops and math.fsum, AUROC via all-pairs enumeration, G-mean via full
confusion counting.
"""
from __future__ import annotations

import math


def brute_force_topk(items, query_vec, k):
    """items: iterable of (id, vector). Full cosine scan + stable sort."""
    query = list(float(x) for x in query_vec)
    qnorm = math.sqrt(math.fsum(x * x for x in query))
    scored = []
    for pid, vec in items:
        v = [float(x) for x in vec]
        dot = math.fsum(a * b for a, b in zip(query, v))
        vnorm = math.sqrt(math.fsum(x * x for x in v))
        scored.append((pid, dot / (qnorm * vnorm)))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def all_pairs_auroc(scores, labels):
    positives = [s for s, y in zip(scores, labels) if y == 1]
    negatives = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in positives:
        for n in negatives:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(positives) * len(negatives))


def confusion_gmean(y_true, y_pred, positive_class):
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == positive_class and p == positive_class)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == positive_class and p != positive_class)
    tn = sum(1 for t, p in zip(y_true, y_pred) if t != positive_class and p != positive_class)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t != positive_class and p == positive_class)
    sens = tp / (tp + fn) if tp + fn else 0.0
    spec = tn / (tn + fp) if tn + fp else 0.0
    return 100.0 * math.sqrt(sens * spec)
