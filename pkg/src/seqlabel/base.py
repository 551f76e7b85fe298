"""Probabilistic multi-class base learners: categorical/Gaussian naive Bayes
and an information-gain decision tree.

Both expose ``predict_dist(x) -> distribution`` and are deterministic for a
fixed training set.  Laplace smoothing (constant 1) keeps every output
probability strictly positive, which chain and trellis decoders rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Feature, argmax_lowest, normalize_log_scores

VAR_FLOOR = 1e-6
GAIN_EPS = 1e-9

BASE_KINDS = ("nb", "dt")


def _check_arity(x: np.ndarray, D: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (D,):
        raise ValueError(f"feature arity {x.shape} does not match training arity ({D},)")
    return x


class NaiveBayesModel:
    """Laplace-smoothed priors and per-feature conditionals.

    Categorical features use smoothed count tables over the declared
    cardinality; numeric features use per-class Gaussians with a variance
    floor so constant features cannot produce singular likelihoods.
    """

    def __init__(self, features, log_priors, cat_positions, cat_cards, cat_offsets,
                 cat_log_table, num_positions, num_mean, num_inv2var, num_logconst):
        self.features = tuple(features)
        self.n_classes = len(log_priors)
        self.log_priors = log_priors
        self.cat_positions = cat_positions
        self.cat_cards = cat_cards
        self.cat_offsets = cat_offsets
        self.cat_log_table = cat_log_table
        self.num_positions = num_positions
        self.num_mean = num_mean
        self.num_inv2var = num_inv2var
        self.num_logconst = num_logconst

    def log_scores(self, x) -> np.ndarray:
        """Unnormalized per-class log joint scores log p(c) + sum_j log p(x_j|c)."""
        x = _check_arity(x, len(self.features))
        scores = self.log_priors.copy()
        if self.cat_positions.size:
            raw = x[self.cat_positions]
            codes = raw.astype(np.int64)
            if np.any(raw != codes) or np.any(codes < 0) or np.any(codes >= self.cat_cards):
                bad = int(np.argmax((raw != codes) | (codes < 0) | (codes >= self.cat_cards)))
                j = int(self.cat_positions[bad])
                raise ValueError(
                    f"feature {j}: code {raw[bad]!r} outside declared cardinality "
                    f"{int(self.cat_cards[bad])}"
                )
            scores += self.cat_log_table[:, self.cat_offsets + codes].sum(axis=1)
        if self.num_positions.size:
            xv = x[self.num_positions]
            scores += self.num_logconst - ((xv - self.num_mean) ** 2 * self.num_inv2var).sum(axis=1)
        return scores

    def predict_dist(self, x) -> np.ndarray:
        return normalize_log_scores(self.log_scores(x))

    def predict(self, x) -> int:
        return argmax_lowest(self.log_scores(x))

    def to_dict(self) -> dict:
        return {
            "kind": "naive-bayes",
            "features": [f.to_dict() for f in self.features],
            "log_priors": self.log_priors.tolist(),
            "cat_positions": self.cat_positions.tolist(),
            "cat_cards": self.cat_cards.tolist(),
            "cat_log_table": self.cat_log_table.tolist(),
            "num_positions": self.num_positions.tolist(),
            "num_mean": self.num_mean.tolist(),
            "num_inv2var": self.num_inv2var.tolist(),
            "num_logconst": self.num_logconst.tolist(),
        }

    @staticmethod
    def from_dict(d: dict) -> "NaiveBayesModel":
        features = tuple(Feature.from_dict(f) for f in d["features"])
        cat_positions = np.asarray(d["cat_positions"], dtype=np.int64)
        cat_cards = np.asarray(d["cat_cards"], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(cat_cards)[:-1]]).astype(np.int64) \
            if cat_cards.size else np.zeros(0, dtype=np.int64)
        return NaiveBayesModel(
            features,
            np.asarray(d["log_priors"], dtype=np.float64),
            cat_positions,
            cat_cards,
            offsets,
            np.asarray(d["cat_log_table"], dtype=np.float64).reshape(
                len(d["log_priors"]), -1) if cat_cards.size else
            np.zeros((len(d["log_priors"]), 0)),
            np.asarray(d["num_positions"], dtype=np.int64),
            np.asarray(d["num_mean"], dtype=np.float64),
            np.asarray(d["num_inv2var"], dtype=np.float64),
            np.asarray(d["num_logconst"], dtype=np.float64),
        )


def nb_train(X, y, n_classes: int, features: tuple[Feature, ...],
             var_floor: float = VAR_FLOOR) -> NaiveBayesModel:
    """Train naive Bayes by counting.

    Priors and categorical conditionals are Laplace-smoothed with constant 1;
    numeric features get per-class (mean, variance) with ``var_floor``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training data must be a nonempty (N, D) matrix")
    if X.shape[1] != len(features):
        raise ValueError("feature metadata arity does not match data")
    if y.min(initial=0) < 0 or y.max(initial=0) >= n_classes:
        raise ValueError("labels outside 0..n_classes-1")
    N = X.shape[0]
    class_counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    log_priors = np.log((class_counts + 1.0) / (N + n_classes))

    cat_positions = [j for j, f in enumerate(features) if f.kind == "categorical"]
    num_positions = [j for j, f in enumerate(features) if f.kind == "numeric"]
    cat_cards = np.array([features[j].cardinality for j in cat_positions], dtype=np.int64)
    tables = []
    for j, card in zip(cat_positions, cat_cards):
        codes = X[:, j].astype(np.int64)
        if np.any(codes < 0) or np.any(codes >= card):
            raise ValueError(f"feature {j}: training codes outside declared cardinality {card}")
        counts = np.zeros((n_classes, card), dtype=np.float64)
        np.add.at(counts, (y, codes), 1.0)
        tables.append(np.log((counts + 1.0) / (class_counts + card)[:, None]))
    cat_log_table = np.concatenate(tables, axis=1) if tables else np.zeros((n_classes, 0))
    cat_offsets = np.concatenate([[0], np.cumsum(cat_cards)[:-1]]).astype(np.int64) \
        if cat_cards.size else np.zeros(0, dtype=np.int64)

    Dn = len(num_positions)
    num_mean = np.zeros((n_classes, Dn))
    num_var = np.zeros((n_classes, Dn))
    if Dn:
        Xn = X[:, num_positions]
        global_mean = Xn.mean(axis=0)
        global_var = np.maximum(Xn.var(axis=0), var_floor)
        for c in range(n_classes):
            rows = Xn[y == c]
            if rows.shape[0] == 0:
                # unseen class: fall back to the pooled statistics
                num_mean[c] = global_mean
                num_var[c] = global_var
            else:
                num_mean[c] = rows.mean(axis=0)
                num_var[c] = np.maximum(rows.var(axis=0), var_floor)
    num_inv2var = 1.0 / (2.0 * num_var) if Dn else np.zeros((n_classes, 0))
    num_logconst = (-0.5 * np.log(2.0 * math.pi * num_var)).sum(axis=1) if Dn \
        else np.zeros(n_classes)

    return NaiveBayesModel(
        features, log_priors,
        np.asarray(cat_positions, dtype=np.int64), cat_cards, cat_offsets, cat_log_table,
        np.asarray(num_positions, dtype=np.int64), num_mean, num_inv2var, num_logconst,
    )


# ---------------------------------------------------------------------------
# decision tree


@dataclass
class DTNode:
    counts: tuple[int, ...]
    feature: int | None = None          # None = leaf
    threshold: float | None = None      # numeric split
    left: "DTNode | None" = None
    right: "DTNode | None" = None
    children: dict[int, "DTNode"] | None = None  # categorical split, keyed by code

    def dist(self, n_classes: int) -> np.ndarray:
        c = np.asarray(self.counts, dtype=np.float64)
        return (c + 1.0) / (c.sum() + n_classes)

    def to_dict(self) -> dict:
        d: dict = {"counts": list(self.counts)}
        if self.feature is not None:
            d["feature"] = self.feature
            if self.children is not None:
                d["children"] = {str(k): v.to_dict() for k, v in self.children.items()}
            else:
                d["threshold"] = self.threshold
                d["left"] = self.left.to_dict()
                d["right"] = self.right.to_dict()
        return d

    @staticmethod
    def from_dict(d: dict) -> "DTNode":
        node = DTNode(counts=tuple(d["counts"]))
        if "feature" in d:
            node.feature = d["feature"]
            if "children" in d:
                node.children = {int(k): DTNode.from_dict(v) for k, v in d["children"].items()}
            else:
                node.threshold = d["threshold"]
                node.left = DTNode.from_dict(d["left"])
                node.right = DTNode.from_dict(d["right"])
        return node


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / totals, 0.0)
        logs = np.where(p > 0, np.log(p), 0.0)
    return -(p * logs).sum(axis=1)


class DecisionTreeModel:
    """Greedy top-down tree maximizing information gain.

    Categorical splits are multiway over the values observed at the node
    (each categorical feature is tested at most once per path); numeric
    splits are binary thresholds at midpoints between sorted distinct
    values.  Leaves hold Laplace-smoothed class-count distributions.
    """

    def __init__(self, features: tuple[Feature, ...], n_classes: int, root: DTNode):
        self.features = tuple(features)
        self.n_classes = n_classes
        self.root = root

    def _route(self, x: np.ndarray) -> DTNode:
        node = self.root
        while node.feature is not None:
            j = node.feature
            if node.children is not None:
                raw = x[j]
                code = int(raw)
                card = self.features[j].cardinality
                if raw != code or not (0 <= code < card):
                    raise ValueError(f"feature {j}: code {raw!r} outside declared cardinality {card}")
                child = node.children.get(code)
                if child is None:
                    return node  # value unseen at this node: stop here
                node = child
            else:
                node = node.left if x[j] <= node.threshold else node.right
        return node

    def predict_dist(self, x) -> np.ndarray:
        x = _check_arity(x, len(self.features))
        return self._route(x).dist(self.n_classes)

    def predict(self, x) -> int:
        return argmax_lowest(self.predict_dist(x))

    def to_dict(self) -> dict:
        return {
            "kind": "decision-tree",
            "features": [f.to_dict() for f in self.features],
            "n_classes": self.n_classes,
            "root": self.root.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "DecisionTreeModel":
        return DecisionTreeModel(
            tuple(Feature.from_dict(f) for f in d["features"]),
            d["n_classes"],
            DTNode.from_dict(d["root"]),
        )


def _best_numeric_split(vals: np.ndarray, y: np.ndarray, n_classes: int, node_entropy: float):
    """Best (gain, threshold) over midpoints; ties resolve to the lowest threshold."""
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    sy = y[order]
    boundaries = np.nonzero(sv[1:] != sv[:-1])[0]
    if boundaries.size == 0:
        return None
    onehot = np.zeros((len(sy), n_classes))
    onehot[np.arange(len(sy)), sy] = 1.0
    cum = np.cumsum(onehot, axis=0)
    total = cum[-1]
    left = cum[boundaries]
    right = total - left
    nl = left.sum(axis=1)
    nr = right.sum(axis=1)
    n = len(sy)
    gains = node_entropy - (nl / n) * _entropy_rows(left) - (nr / n) * _entropy_rows(right)
    best = int(np.argmax(gains))  # first max = lowest threshold
    thr = (sv[boundaries[best]] + sv[boundaries[best] + 1]) / 2.0
    return float(gains[best]), float(thr)


def _grow(X: np.ndarray, y: np.ndarray, n_classes: int, features, used_cat: frozenset,
          depth: int, min_leaf: int, max_depth: int | None) -> DTNode:
    counts = np.bincount(y, minlength=n_classes)
    node = DTNode(counts=tuple(int(c) for c in counts))
    n = len(y)
    impure = int((counts > 0).sum()) > 1
    if not impure or n < 2 * min_leaf or (max_depth is not None and depth >= max_depth):
        return node
    node_entropy = _entropy(counts.astype(np.float64))

    best_gain = -1.0
    best_j = -1
    best_split = None  # ("cat", groups) | ("num", threshold)
    fallback = None    # lowest-index feature that partitions at all
    for j, feat in enumerate(features):
        if feat.kind == "categorical":
            if j in used_cat:
                continue
            codes = X[:, j].astype(np.int64)
            uniq = np.unique(codes)
            if uniq.size < 2:
                continue
            child_entropy = 0.0
            for v in uniq:
                mask = codes == v
                child_entropy += (mask.sum() / n) * _entropy(
                    np.bincount(y[mask], minlength=n_classes).astype(np.float64))
            gain = node_entropy - child_entropy
            split = ("cat", None)
        else:
            res = _best_numeric_split(X[:, j], y, n_classes, node_entropy)
            if res is None:
                continue
            gain, thr = res
            split = ("num", thr)
        if fallback is None:
            fallback = (j, split)
        if gain > best_gain:
            best_gain, best_j, best_split = gain, j, split

    if best_j < 0:
        return node  # nothing partitions the data
    if best_gain < GAIN_EPS:
        # zero-gain but impure: split anyway on the lowest-index usable feature,
        # so conjunctive (XOR-like) structure between features can still be found
        best_j, best_split = fallback

    node.feature = best_j
    if best_split[0] == "cat":
        codes = X[:, best_j].astype(np.int64)
        node.children = {}
        for v in np.unique(codes):
            mask = codes == v
            node.children[int(v)] = _grow(
                X[mask], y[mask], n_classes, features, used_cat | {best_j},
                depth + 1, min_leaf, max_depth)
    else:
        thr = best_split[1]
        node.threshold = thr
        mask = X[:, best_j] <= thr
        node.left = _grow(X[mask], y[mask], n_classes, features, used_cat,
                          depth + 1, min_leaf, max_depth)
        node.right = _grow(X[~mask], y[~mask], n_classes, features, used_cat,
                           depth + 1, min_leaf, max_depth)
    return node


def dt_train(X, y, n_classes: int, features: tuple[Feature, ...],
             min_leaf: int = 2, max_depth: int | None = None) -> DecisionTreeModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training data must be a nonempty (N, D) matrix")
    if X.shape[1] != len(features):
        raise ValueError("feature metadata arity does not match data")
    root = _grow(X, y, n_classes, features, frozenset(), 0, min_leaf, max_depth)
    return DecisionTreeModel(features, n_classes, root)


def train_base(kind: str, X, y, n_classes: int, features: tuple[Feature, ...], **params):
    if kind == "nb":
        return nb_train(X, y, n_classes, features, **params)
    if kind == "dt":
        return dt_train(X, y, n_classes, features, **params)
    raise ValueError(f"unknown base learner {kind!r} (expected one of {BASE_KINDS})")


def base_model_from_dict(d: dict):
    if d["kind"] == "naive-bayes":
        return NaiveBayesModel.from_dict(d)
    if d["kind"] == "decision-tree":
        return DecisionTreeModel.from_dict(d)
    raise ValueError(f"unknown base model kind {d['kind']!r}")
