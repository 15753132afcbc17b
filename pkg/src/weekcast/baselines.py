"""Classical classifiers and regressors used as reference points for the CNNs.

Everything here is trained from scratch on the daily feature rows: features are
the nine variables of day t, the label is whether close_perc of day t+1 is
positive. Implementations are deterministic given a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .features import FEATURE_NAMES, FeatureTable
from .nn import network, training
from .nn.network import NetworkSpec, dense, flat_shape, relu

N_FEATURES = len(FEATURE_NAMES)

CLASSIFIER_NAMES = ("logistic", "knn", "tree", "bagging", "random_forest", "adaboost", "ann")


class BaselineError(ValueError):
    pass


def build_labeled_dataset(table: FeatureTable) -> tuple[np.ndarray, np.ndarray]:
    """Day-t feature matrix and next-day direction labels (1 = up, 0 = down/flat)."""
    matrix = table.matrix()
    if matrix.shape[0] < 2:
        raise BaselineError("need at least two feature rows to form one labeled sample")
    close = table.column("close_perc")
    labels = (close[1:] > 0.0).astype(np.int64)
    return matrix[:-1], labels


def build_regression_dataset(table: FeatureTable) -> tuple[np.ndarray, np.ndarray]:
    """Day-t feature matrix and next-day close_perc targets."""
    matrix = table.matrix()
    if matrix.shape[0] < 2:
        raise BaselineError("need at least two feature rows to form one regression sample")
    close = table.column("close_perc")
    return matrix[:-1], close[1:].astype(np.float64)


# ---------------------------------------------------------------------------
# logistic regression


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    epochs: int
    lr: float

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    def describe(self) -> dict:
        return {"kind": "logistic", "epochs": self.epochs, "lr": self.lr}


def train_logistic(X, y, epochs: int = 500, lr: float = 0.1) -> LogisticModel:
    """Full-batch gradient descent on the mean log-loss, zero-initialized."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(epochs):
        p = 1.0 / (1.0 + np.exp(-(X @ w + b)))
        residual = p - y
        w = w - lr * (X.T @ residual) / n
        b = b - lr * float(residual.mean())
    return LogisticModel(weights=w, bias=b, epochs=epochs, lr=lr)


# ---------------------------------------------------------------------------
# k-nearest neighbours


@dataclass(frozen=True)
class KnnModel:
    X: np.ndarray
    y: np.ndarray
    k: int

    def predict(self, X) -> np.ndarray:
        Q = np.asarray(X, dtype=np.float64)
        d2 = np.sum((Q[:, None, :] - self.X[None, :, :]) ** 2, axis=2)
        # stable sort keeps the lowest training index among equal distances
        order = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        votes = self.y[order]
        ups = votes.sum(axis=1)
        downs = self.k - ups
        labels = (ups > downs).astype(np.int64)
        tied = ups == downs
        if np.any(tied):
            labels[tied] = self.y[order[tied, 0]]
        return labels

    def describe(self) -> dict:
        return {"kind": "knn", "k": self.k, "n_train": int(self.y.size)}


def train_knn(X, y, k: int = 5) -> KnnModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if not 1 <= k <= X.shape[0]:
        raise BaselineError(f"k={k} outside 1..{X.shape[0]}")
    return KnnModel(X=X, y=y, k=k)


# ---------------------------------------------------------------------------
# CART trees (gini for labels, variance reduction for continuous targets)


@dataclass(frozen=True)
class TreeNode:
    value: float = 0.0
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class TreeModel:
    root: TreeNode
    mode: str
    max_depth: int
    min_leaf: int

    def predict(self, X) -> np.ndarray:
        Q = np.asarray(X, dtype=np.float64)
        out = np.empty(Q.shape[0])
        self._fill(self.root, Q, np.arange(Q.shape[0]), out)
        if self.mode == "gini":
            return out.astype(np.int64)
        return out

    def _fill(self, node: TreeNode, Q, idx, out):
        if node.is_leaf:
            out[idx] = node.value
            return
        go_left = Q[idx, node.feature] <= node.threshold
        self._fill(node.left, Q, idx[go_left], out)
        self._fill(node.right, Q, idx[~go_left], out)

    def node_count(self) -> int:
        def count(n):
            return 1 if n.is_leaf else 1 + count(n.left) + count(n.right)

        return count(self.root)

    def describe(self) -> dict:
        return {
            "kind": "tree",
            "mode": self.mode,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "nodes": self.node_count(),
        }


def _leaf_value(y: np.ndarray, mode: str) -> float:
    if mode == "variance":
        return float(y.mean())
    ups = int(np.sum(y == 1))
    downs = y.size - ups
    return 1.0 if ups > downs else 0.0  # tie keeps the down/flat class


def _parent_impurity(y: np.ndarray, mode: str) -> float:
    if mode == "variance":
        return float(np.var(y))
    p = np.mean(y == 1)
    return float(1.0 - p * p - (1.0 - p) ** 2)


def _best_split(X, y, features, min_leaf: int, mode: str):
    """Best (gain, feature, threshold) over midpoint candidates, or None.

    Ties resolve to the lowest feature index, then the lowest threshold.
    """
    n = y.size
    parent = _parent_impurity(y, mode)
    best = None
    n_left = np.arange(1, n)
    n_right = n - n_left
    size_ok = (n_left >= min_leaf) & (n_right >= min_leaf)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        valid = (xs[:-1] < xs[1:]) & size_ok
        if not valid.any():
            continue
        if mode == "gini":
            left_pos = np.cumsum(ys == 1)[:-1]
            left_neg = n_left - left_pos
            right_pos = left_pos[-1] + (1 if ys[-1] == 1 else 0) - left_pos
            right_neg = n_right - right_pos
            g_left = 1.0 - (left_pos**2 + left_neg**2) / n_left**2
            g_right = 1.0 - (right_pos**2 + right_neg**2) / n_right**2
            child = (n_left * g_left + n_right * g_right) / n
        else:
            cy = np.cumsum(ys)[:-1]
            cy2 = np.cumsum(ys * ys)[:-1]
            total_y = cy[-1] + ys[-1]
            total_y2 = cy2[-1] + ys[-1] ** 2
            var_left = cy2 / n_left - (cy / n_left) ** 2
            var_right = (total_y2 - cy2) / n_right - ((total_y - cy) / n_right) ** 2
            child = (n_left * var_left + n_right * var_right) / n
        gain = np.where(valid, parent - child, -np.inf)
        i = int(np.argmax(gain))  # first maximum -> lowest threshold
        if gain[i] > 0.0 and (best is None or gain[i] > best[0]):
            best = (float(gain[i]), int(f), float((xs[i] + xs[i + 1]) / 2.0))
    return best


def _grow(X, y, depth, max_depth, min_leaf, mode, rng, n_split_features):
    pure = np.all(y == y[0])
    if depth >= max_depth or y.size < 2 * min_leaf or pure:
        return TreeNode(value=_leaf_value(y, mode))
    if n_split_features is None:
        features = range(X.shape[1])
    else:
        features = np.sort(rng.choice(X.shape[1], size=n_split_features, replace=False))
    split = _best_split(X, y, features, min_leaf, mode)
    if split is None:
        return TreeNode(value=_leaf_value(y, mode))
    _, f, thr = split
    go_left = X[:, f] <= thr
    return TreeNode(
        feature=f,
        threshold=thr,
        left=_grow(X[go_left], y[go_left], depth + 1, max_depth, min_leaf, mode, rng, n_split_features),
        right=_grow(X[~go_left], y[~go_left], depth + 1, max_depth, min_leaf, mode, rng, n_split_features),
    )


def train_tree(
    X,
    y,
    mode: str = "gini",
    max_depth: int = 6,
    min_leaf: int = 5,
    rng=None,
    n_split_features: int | None = None,
) -> TreeModel:
    if mode not in ("gini", "variance"):
        raise BaselineError(f"unknown tree mode {mode!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64 if mode == "variance" else np.int64)
    root = _grow(X, y, 0, max_depth, min_leaf, mode, rng, n_split_features)
    return TreeModel(root=root, mode=mode, max_depth=max_depth, min_leaf=min_leaf)


# ---------------------------------------------------------------------------
# bootstrap ensembles


@dataclass(frozen=True)
class EnsembleModel:
    trees: tuple
    kind: str  # "bagging" or "random_forest"
    n_split_features: int | None

    def predict(self, X) -> np.ndarray:
        Q = np.asarray(X, dtype=np.float64)
        votes = np.sum([t.predict(Q) for t in self.trees], axis=0)
        return (votes > len(self.trees) / 2.0).astype(np.int64)  # tie -> 0

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "n_models": len(self.trees),
            "split_features": self.n_split_features,
        }


def _train_ensemble(X, y, kind, n_models, seed, max_depth, min_leaf, n_split_features):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(n_models):
        idx = rng.integers(0, X.shape[0], size=X.shape[0])
        trees.append(
            train_tree(
                X[idx], y[idx],
                mode="gini", max_depth=max_depth, min_leaf=min_leaf,
                rng=rng, n_split_features=n_split_features,
            )
        )
    return EnsembleModel(trees=tuple(trees), kind=kind, n_split_features=n_split_features)


def train_bagging(X, y, n_models: int = 100, seed: int = 0, max_depth: int = 6, min_leaf: int = 5):
    return _train_ensemble(X, y, "bagging", n_models, seed, max_depth, min_leaf, None)


def train_random_forest(
    X, y, n_models: int = 100, seed: int = 0, max_depth: int = 6, min_leaf: int = 5,
    n_split_features: int = 3,
):
    n_features = np.asarray(X).shape[1]
    if not 1 <= n_split_features <= n_features:
        raise BaselineError(
            f"n_split_features={n_split_features} outside 1..{n_features}"
        )
    return _train_ensemble(X, y, "random_forest", n_models, seed, max_depth, min_leaf, n_split_features)


# ---------------------------------------------------------------------------
# AdaBoost over decision stumps


@dataclass(frozen=True)
class Stump:
    feature: int
    threshold: float
    left_label: int
    right_label: int

    def predict(self, X) -> np.ndarray:
        go_left = np.asarray(X, dtype=np.float64)[:, self.feature] <= self.threshold
        return np.where(go_left, self.left_label, self.right_label).astype(np.int64)


def _best_stump(X, y, w):
    """Weighted-error-minimizing stump; ties go to lowest feature then threshold."""
    n = y.size
    total_pos = float(np.sum(w[y == 1]))
    total_neg = float(np.sum(w[y == 0]))
    best = None  # (error, feature, threshold, left_label, right_label)
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        ws = w[order]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        left_pos = np.cumsum(np.where(ys == 1, ws, 0.0))[:-1]
        left_neg = np.cumsum(np.where(ys == 0, ws, 0.0))[:-1]
        right_pos = total_pos - left_pos
        right_neg = total_neg - left_neg
        # each side predicts its weighted majority (ties -> 0)
        left_label = (left_pos > left_neg).astype(np.int64)
        right_label = (right_pos > right_neg).astype(np.int64)
        err = np.where(left_label == 1, left_neg, left_pos)
        err = err + np.where(right_label == 1, right_neg, right_pos)
        err = np.where(valid, err, np.inf)
        i = int(np.argmin(err))  # first minimum -> lowest threshold
        if best is None or err[i] < best[0]:
            best = (
                float(err[i]), f, float((xs[i] + xs[i + 1]) / 2.0),
                int(left_label[i]), int(right_label[i]),
            )
    if best is None:
        return None, None
    error, f, thr, ll, rl = best
    return Stump(feature=f, threshold=thr, left_label=ll, right_label=rl), error


@dataclass(frozen=True)
class AdaBoostModel:
    stumps: tuple
    alphas: tuple
    rounds: int

    def decision_function(self, X) -> np.ndarray:
        Q = np.asarray(X, dtype=np.float64)
        score = np.zeros(Q.shape[0])
        for stump, alpha in zip(self.stumps, self.alphas):
            score += alpha * (2.0 * stump.predict(Q) - 1.0)
        return score

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    def describe(self) -> dict:
        return {"kind": "adaboost", "rounds": self.rounds, "stumps": len(self.stumps)}


def train_adaboost(X, y, rounds: int = 100) -> AdaBoostModel:
    """Discrete AdaBoost: alpha = 0.5*ln((1-err)/err); stops early on a perfect
    stump or when no stump beats chance."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = y.size
    w = np.full(n, 1.0 / n)
    y_signed = 2.0 * y - 1.0
    stumps = []
    alphas = []
    for _ in range(rounds):
        stump, error = _best_stump(X, y, w)
        if stump is None or error >= 0.5:
            break
        if error <= 0.0:
            alphas.append(0.5 * math.log((1.0 - 1e-12) / 1e-12))
            stumps.append(stump)
            break
        alpha = 0.5 * math.log((1.0 - error) / error)
        stumps.append(stump)
        alphas.append(alpha)
        h_signed = 2.0 * stump.predict(X) - 1.0
        w = w * np.exp(-alpha * y_signed * h_signed)
        w = w / w.sum()
    if not stumps:
        raise BaselineError("no stump beat chance on the first boosting round")
    return AdaBoostModel(stumps=tuple(stumps), alphas=tuple(alphas), rounds=rounds)


# ---------------------------------------------------------------------------
# linear regression


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray  # [n_features]
    bias: float
    ridge: float

    def predict(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias

    def describe(self) -> dict:
        return {"kind": "linear", "ridge": self.ridge}


def train_linear(X, y) -> LinearModel:
    """Ordinary least squares by normal equations, with a tiny ridge fallback
    if the Gram matrix is singular."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    gram = A.T @ A
    rhs = A.T @ y
    ridge = 0.0
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        ridge = 1e-8
        coef = np.linalg.solve(gram + ridge * np.eye(gram.shape[0]), rhs)
    return LinearModel(weights=coef[:-1], bias=float(coef[-1]), ridge=ridge)


# ---------------------------------------------------------------------------
# small dense network trained with the shared engine


@dataclass(frozen=True)
class AnnClassifier:
    spec: NetworkSpec
    params: dict
    epochs: int
    batch_size: int

    def decision_function(self, X) -> np.ndarray:
        Q = np.asarray(X, dtype=np.float64)
        return training.predict(self.spec, self.params, (Q,))[:, 0]

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    def describe(self) -> dict:
        return {
            "kind": "ann",
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "parameters": network.param_count(self.params),
        }


def ann_spec(n_features: int = N_FEATURES) -> NetworkSpec:
    return NetworkSpec(
        input_shapes=(flat_shape(n_features),),
        heads=((),),
        tail=(dense(16), relu(), dense(1)),
    )


def train_ann(X, y, seed: int = 0, epochs: int = 100, batch_size: int = 16, lr: float = 0.001) -> AnnClassifier:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)[:, None]
    spec = ann_spec(X.shape[1])
    params = network.init_params(spec, seed)
    config = training.TrainingConfig(epochs=epochs, batch_size=batch_size, seed=seed)
    dataset = training.ArrayDataset(inputs=(X,), targets=y)
    params, _ = training.fit(spec, params, dataset, config, loss="logloss", lr=lr)
    return AnnClassifier(spec=spec, params=params, epochs=epochs, batch_size=batch_size)


# ---------------------------------------------------------------------------


def train_classifier(name: str, X, y, seed: int = 0):
    if name == "logistic":
        return train_logistic(X, y)
    if name == "knn":
        return train_knn(X, y)
    if name == "tree":
        return train_tree(X, y)
    if name == "bagging":
        return train_bagging(X, y, seed=seed)
    if name == "random_forest":
        return train_random_forest(X, y, seed=seed)
    if name == "adaboost":
        return train_adaboost(X, y)
    if name == "ann":
        return train_ann(X, y, seed=seed)
    raise BaselineError(f"unknown classifier {name!r}; expected one of {CLASSIFIER_NAMES}")
