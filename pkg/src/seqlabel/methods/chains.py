"""Chain-structured predictors over per-position base classifiers.

One family of models covers three factorizations of p(y|x):

* independent — every position conditions on x alone;
* prev (first-order) — each position additionally conditions on the
  immediately previous label in the chain;
* all — each position conditions on every earlier label in the chain.

Greedy forward decoding works on any of them.  First-order chains also
support exact MAP decoding with the Viterbi dynamic program; all-previous
chains support Monte-Carlo search over sampled candidate paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..base import base_model_from_dict, train_base
from ..core import Dataset, Feature, LabelSchema, LabelVector, argmax_lowest
from ..rng import derive_rng, digest_array

MODES = ("independent", "prev", "all")


def _validate_order(order, T: int) -> tuple[int, ...]:
    order = tuple(int(p) for p in order)
    if sorted(order) != list(range(T)):
        raise ValueError(f"order {order} is not a permutation of 0..{T - 1}")
    return order


def _extra_positions(order: tuple[int, ...], mode: str, s: int) -> tuple[int, ...]:
    """Chain positions whose labels feed step ``s`` as extra features."""
    if mode == "all":
        return order[:s]
    if mode == "prev":
        return order[s - 1:s] if s > 0 else ()
    return ()


@dataclass
class ChainModel:
    """Per-position classifiers f_t plus the wiring between them."""

    schema: LabelSchema
    features: tuple[Feature, ...]
    mode: str
    order: tuple[int, ...]
    models: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown chain mode {self.mode!r}")

    @property
    def D(self) -> int:
        return len(self.features)

    def _buffer(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.D,):
            raise ValueError(f"feature arity {x.shape} does not match training arity ({self.D},)")
        buf = np.empty(self.D + max(0, self.schema.T - 1))
        buf[: self.D] = x
        return buf

    def step_dist(self, buf: np.ndarray, s: int, prefix) -> np.ndarray:
        """Distribution of chain step ``s`` given earlier chain-step values."""
        extras = _extra_positions(self.order, self.mode, s)
        for j in range(len(extras)):
            buf[self.D + j] = prefix[s - len(extras) + j]
        return self.models[s].predict_dist(buf[: self.D + len(extras)])

    def predict(self, x) -> LabelVector:
        """Greedy forward decoding along the chain order."""
        buf = self._buffer(x)
        vals: list[int] = []
        for s in range(self.schema.T):
            dist = self.step_dist(buf, s, vals)
            vals.append(argmax_lowest(dist))
        out = [0] * self.schema.T
        for s, pos in enumerate(self.order):
            out[pos] = vals[s]
        return tuple(out)

    def joint_score(self, x, y) -> float:
        """Product of the model's conditionals along its factorization at y."""
        if not self.schema.conforms(y):
            raise ValueError("label vector does not conform to the schema")
        buf = self._buffer(x)
        vals = [int(y[pos]) for pos in self.order]
        p = 1.0
        for s in range(self.schema.T):
            dist = self.step_dist(buf, s, vals)
            p *= float(dist[vals[s]])
        return p

    def to_dict(self) -> dict:
        return {
            "kind": "chain",
            "mode": self.mode,
            "order": list(self.order),
            "cardinalities": list(self.schema.cardinalities),
            "features": [f.to_dict() for f in self.features],
            "models": [m.to_dict() for m in self.models],
        }

    @staticmethod
    def from_dict(d: dict) -> "ChainModel":
        return ChainModel(
            LabelSchema(tuple(d["cardinalities"])),
            tuple(Feature.from_dict(f) for f in d["features"]),
            d["mode"],
            tuple(d["order"]),
            tuple(base_model_from_dict(m) for m in d["models"]),
        )


def chain_train(d: Dataset, base: str, mode: str, order=None,
                base_params: dict | None = None) -> ChainModel:
    """Train one base classifier per chain step with teacher forcing: the
    extra label features are the true labels of earlier-in-order positions."""
    T = d.schema.T
    order = _validate_order(order if order is not None else range(T), T)
    base_params = base_params or {}
    models = []
    for s, pos in enumerate(order):
        extras = _extra_positions(order, mode, s)
        feats = d.features + tuple(
            Feature.categorical(d.schema.cardinalities[p], f"y{p}") for p in extras)
        if extras:
            Xs = np.concatenate([d.X] + [d.Y[:, p:p + 1].astype(np.float64) for p in extras],
                                axis=1)
        else:
            Xs = d.X
        models.append(train_base(base, Xs, d.Y[:, pos], d.schema.cardinalities[pos],
                                 feats, **base_params))
    return ChainModel(d.schema, d.features, mode, order, tuple(models))


def ic_train(d: Dataset, base: str = "nb", base_params: dict | None = None) -> ChainModel:
    """Independent classifiers: T separate models on x only."""
    return chain_train(d, base, "independent", base_params=base_params)


def cc_train(d: Dataset, base: str = "nb", order=None,
             base_params: dict | None = None) -> ChainModel:
    """Classifier chain: step s conditions on all earlier-in-order labels."""
    return chain_train(d, base, "all", order=order, base_params=base_params)


def memm_train(d: Dataset, base: str = "nb", base_params: dict | None = None) -> ChainModel:
    """First-order chain in time order: each position conditions only on the
    immediately previous label.  Decode greedily (``predict``) or exactly
    (``vcc_predict``)."""
    return chain_train(d, base, "prev", base_params=base_params)


@dataclass
class ViterbiTable:
    """Best-path scores (delta) and backpointers (psi) per chain step."""

    delta: list[np.ndarray]
    psi: list[np.ndarray]


def viterbi_table(m: ChainModel, x) -> ViterbiTable:
    """Fill the dynamic-programming table for a first-order chain."""
    if m.mode != "prev":
        raise ValueError("Viterbi decoding requires a first-order ('prev') chain")
    buf = m._buffer(x)
    cards = [m.schema.cardinalities[p] for p in m.order]
    delta = [m.models[0].predict_dist(buf[: m.D])]
    psi = [np.zeros(cards[0], dtype=np.int64)]
    for s in range(1, m.schema.T):
        L_prev, L_s = cards[s - 1], cards[s]
        trans = np.empty((L_prev, L_s))
        for i in range(L_prev):
            buf[m.D] = i
            trans[i] = m.models[s].predict_dist(buf[: m.D + 1])
        scores = delta[s - 1][:, None] * trans
        back = np.argmax(scores, axis=0)  # ties to the lowest previous value
        delta.append(scores[back, np.arange(L_s)])
        psi.append(back.astype(np.int64))
    return ViterbiTable(delta, psi)


def vcc_predict(m: ChainModel, x) -> tuple[LabelVector, float]:
    """Exact MAP path of a first-order chain and its probability.

    Maximizes p(y_1|x) * prod_t p(y_t|x, y_{t-1}) over all value
    combinations via the Viterbi recursion, with the usual termination
    (argmax of the final delta row) and backward trace through psi.
    """
    table = viterbi_table(m, x)
    T = m.schema.T
    vals = [0] * T
    vals[T - 1] = argmax_lowest(table.delta[T - 1])
    prob = float(table.delta[T - 1][vals[T - 1]])
    for s in range(T - 2, -1, -1):
        vals[s] = int(table.psi[s + 1][vals[s + 1]])
    out = [0] * T
    for s, pos in enumerate(m.order):
        out[pos] = vals[s]
    return tuple(out), prob


def pcc_predict(m: ChainModel, x, M: int, seed: int) -> LabelVector:
    """Monte-Carlo search over chain paths.

    The candidate set is the greedy path plus ``M`` ancestral samples from
    the chain conditionals; the candidate with the highest joint probability
    wins.  Deterministic given the seed (the sampling stream is derived from
    the seed and the input, so call order is irrelevant).
    """
    if m.mode != "all":
        raise ValueError("Monte-Carlo chain search requires an all-previous chain")
    if M < 0:
        raise ValueError("sample budget must be >= 0")
    buf = m._buffer(x)
    T = m.schema.T
    cache: dict[tuple[int, tuple[int, ...]], tuple[np.ndarray, np.ndarray]] = {}

    def dist_at(s: int, prefix: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        key = (s, prefix)
        entry = cache.get(key)
        if entry is None:
            d = m.step_dist(buf, s, prefix)
            entry = (d, np.cumsum(d))
            cache[key] = entry
        return entry

    best: list[int] = []
    best_score = 1.0
    for s in range(T):
        dist, _ = dist_at(s, tuple(best))
        v = argmax_lowest(dist)
        best_score *= float(dist[v])
        best.append(v)
    best_vals = tuple(best)

    rng = derive_rng(seed, "pcc-samples", digest_array(np.asarray(x, dtype=np.float64)))
    for _ in range(M):
        prefix: list[int] = []
        score = 1.0
        for s in range(T):
            dist, cum = dist_at(s, tuple(prefix))
            v = min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")),
                    len(dist) - 1)
            score *= float(dist[v])
            prefix.append(v)
        if score > best_score:
            best_score = score
            best_vals = tuple(prefix)

    out = [0] * T
    for s, pos in enumerate(m.order):
        out[pos] = best_vals[s]
    return tuple(out)
