"""Sparse chain variant: each position conditions on a bounded number of
earlier positions, chosen by empirical mutual information with the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..base import base_model_from_dict, train_base
from ..core import Dataset, Feature, LabelSchema, LabelVector, argmax_lowest
from ..rng import derive_rng


def mutual_information(col_a, col_b) -> float:
    """Plug-in mutual information (nats) between two integer columns."""
    a = np.asarray(col_a, dtype=np.int64)
    b = np.asarray(col_b, dtype=np.int64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("columns must be equal-length 1-D integer arrays")
    if a.size < 1:
        raise ValueError("columns must be nonempty")
    n = a.size
    av, ai = np.unique(a, return_inverse=True)
    bv, bi = np.unique(b, return_inverse=True)
    joint = np.zeros((av.size, bv.size))
    np.add.at(joint, (ai, bi), 1.0)
    joint /= n
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    mask = joint > 0
    outer = pa[:, None] * pb[None, :]
    return float((joint[mask] * np.log(joint[mask] / outer[mask])).sum())


@dataclass
class TrellisModel:
    """Per-position classifiers whose parents are earlier high-MI positions."""

    schema: LabelSchema
    features: tuple[Feature, ...]
    order: tuple[int, ...]
    parents: tuple[tuple[int, ...], ...]
    models: tuple

    def predict(self, x) -> LabelVector:
        x = np.asarray(x, dtype=np.float64)
        out = [0] * self.schema.T
        for s, pos in enumerate(self.order):
            pars = self.parents[s]
            if pars:
                xe = np.concatenate([x, np.asarray([out[p] for p in pars], dtype=np.float64)])
            else:
                xe = x
            out[pos] = argmax_lowest(self.models[s].predict_dist(xe))
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "kind": "trellis",
            "cardinalities": list(self.schema.cardinalities),
            "features": [f.to_dict() for f in self.features],
            "order": list(self.order),
            "parents": [list(p) for p in self.parents],
            "models": [m.to_dict() for m in self.models],
        }

    @staticmethod
    def from_dict(d: dict) -> "TrellisModel":
        return TrellisModel(
            LabelSchema(tuple(d["cardinalities"])),
            tuple(Feature.from_dict(f) for f in d["features"]),
            tuple(d["order"]),
            tuple(tuple(p) for p in d["parents"]),
            tuple(base_model_from_dict(m) for m in d["models"]),
        )


def ct_train(d: Dataset, base: str = "nb", ell: int = 2,
             order_strategy: str = "time", seed: int = 0,
             base_params: dict | None = None) -> TrellisModel:
    """Train a classifier trellis of density ``ell``.

    Position order is time order by default (or a seeded random permutation).
    Each position's parents are the min(ell, #earlier) earlier positions with
    the highest mutual information against it; MI ties prefer the nearer
    position, then the lower index.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    T = d.schema.T
    if order_strategy == "time":
        order = tuple(range(T))
    elif order_strategy == "random":
        order = tuple(int(p) for p in derive_rng(seed, "ct-order").permutation(T))
    else:
        raise ValueError(f"unknown order strategy {order_strategy!r}")

    parents: list[tuple[int, ...]] = []
    models = []
    for s, pos in enumerate(order):
        earlier = order[:s]
        scored = sorted(
            earlier,
            key=lambda p: (-mutual_information(d.Y[:, pos], d.Y[:, p]), abs(pos - p), p),
        )
        pars = tuple(sorted(scored[: min(ell, s)]))
        parents.append(pars)
        feats = d.features + tuple(
            Feature.categorical(d.schema.cardinalities[p], f"y{p}") for p in pars)
        if pars:
            Xs = np.concatenate([d.X] + [d.Y[:, p:p + 1].astype(np.float64) for p in pars],
                                axis=1)
        else:
            Xs = d.X
        models.append(train_base(base, Xs, d.Y[:, pos], d.schema.cardinalities[pos],
                                 feats, **(base_params or {})))
    return TrellisModel(d.schema, d.features, order, tuple(parents), tuple(models))
