"""CART decision tree with cost-complexity pruning chosen by cross-validation.

Splits minimize weighted Gini impurity over every (feature, threshold)
pair, thresholds being midpoints between consecutive distinct sorted
values. A value equal to the threshold goes left. Ties between
equally-good splits resolve to the lowest feature index, then the lowest
threshold, so training is deterministic.

Dense arrays and CSR matrices are accepted behind one feature-access
interface: candidate evaluation walks every column in fixed-size blocks,
materializing sparse blocks densely on the fly. Training cost therefore
scales with the feature count for both storage forms (which is why
dimensionality reduction speeds tree training up dramatically), and both
forms produce bit-identical trees. Block size bounds peak memory, not
the result.

The complexity parameter is selected from a fixed grid by stratified
k-fold cross-validation maximizing mean F1, using one weakest-link
pruning path per grown tree so each fold grows only a single tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .evaluation import confusion, kfold_indices, metrics
from .exceptions import DimensionMismatchError, SingleClassError

CCP_ALPHA_GRID = (0.0, 1e-4, 1e-3, 1e-2, 1e-1)


@dataclass
class TreeNode:
    """One node; ``left``/``right`` are node-array indices or None."""

    feature: int | None
    threshold: float | None
    impurity: float
    class_counts: np.ndarray
    left: int | None
    right: int | None
    predicted_label: str

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 30
    min_samples_split: int = 2
    ccp_alpha: float | None = None  # None selects from CCP_ALPHA_GRID by CV


@dataclass
class DecisionTreeModel:
    nodes: list[TreeNode]
    params: TreeParams
    label_order: list[str]
    chosen_alpha: float = 0.0
    cv_mean_f1: dict[float, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "dtree",
            "labelOrder": list(self.label_order),
            "params": {"maxDepth": self.params.max_depth,
                       "minSamplesSplit": self.params.min_samples_split,
                       "ccpAlpha": self.chosen_alpha},
            "nodes": [{"featureIndex": n.feature, "threshold": n.threshold,
                       "impurity": n.impurity,
                       "classCounts": [int(c) for c in n.class_counts],
                       "leftChild": n.left, "rightChild": n.right,
                       "predictedLabel": n.predicted_label}
                      for n in self.nodes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTreeModel":
        p = d["params"]
        nodes = [TreeNode(feature=nd["featureIndex"], threshold=nd["threshold"],
                          impurity=nd["impurity"],
                          class_counts=np.asarray(nd["classCounts"], dtype=np.int64),
                          left=nd["leftChild"], right=nd["rightChild"],
                          predicted_label=nd["predictedLabel"])
                 for nd in d["nodes"]]
        return cls(nodes=nodes,
                   params=TreeParams(p["maxDepth"], p["minSamplesSplit"],
                                     p["ccpAlpha"]),
                   label_order=list(d["labelOrder"]),
                   chosen_alpha=p["ccpAlpha"] or 0.0)


class _ColumnAccess:
    """Uniform per-column reads for dense arrays and CSR matrices."""

    def __init__(self, X):
        self.sparse = sp.issparse(X)
        if self.sparse:
            self.csr = X.tocsr()
            self._csc = None
            self.n, self.n_features = X.shape
        else:
            self.dense = np.asarray(X, dtype=np.float64)
            if self.dense.ndim != 2:
                raise DimensionMismatchError("feature matrix must be 2-d")
            self.n, self.n_features = self.dense.shape

    def column_values(self, j: int, rows: np.ndarray) -> np.ndarray:
        if self.sparse:
            if self._csc is None:
                self._csc = self.csr.tocsc()
            return self._csc[:, j].toarray().ravel()[rows]
        return self.dense[rows, j]

    def submatrix(self, rows: np.ndarray):
        if self.sparse:
            return self.csr[rows]
        return self.dense[rows]


def _gini(counts: np.ndarray, n: int) -> float:
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.dot(p, p))


def _best_split_dense(Xn: np.ndarray, yn: np.ndarray, n_classes: int,
                      parent_gini: float, block: int = 2048):
    """Best (gain, feature, threshold) over a dense node submatrix."""
    nn, nf = Xn.shape
    total = np.bincount(yn, minlength=n_classes).astype(np.float64)
    left_n = np.arange(1, nn, dtype=np.float64)[:, None]
    right_n = nn - left_n
    best = (0.0, -1, 0.0)
    for start in range(0, nf, block):
        Xb = Xn[:, start:start + block]
        order = np.argsort(Xb, axis=0, kind="stable")
        svals = np.take_along_axis(Xb, order, axis=0)
        valid = svals[:-1] < svals[1:]
        if not valid.any():
            continue
        sum_sq_l = np.zeros((nn - 1, Xb.shape[1]))
        sum_sq_r = np.zeros((nn - 1, Xb.shape[1]))
        for c in range(n_classes):
            cum = np.cumsum((yn == c)[order], axis=0)[:-1]
            sum_sq_l += cum * cum
            sum_sq_r += (total[c] - cum) * (total[c] - cum)
        gini_l = 1.0 - sum_sq_l / (left_n * left_n)
        gini_r = 1.0 - sum_sq_r / (right_n * right_n)
        gain = parent_gini - (left_n * gini_l + right_n * gini_r) / nn
        gain[~valid] = -np.inf
        per_feature_cut = np.argmax(gain, axis=0)
        per_feature_gain = gain[per_feature_cut, np.arange(Xb.shape[1])]
        jb = int(np.argmax(per_feature_gain))
        g = float(per_feature_gain[jb])
        if g > best[0]:
            t = int(per_feature_cut[jb])
            thr = (svals[t, jb] + svals[t + 1, jb]) / 2.0
            best = (g, start + jb, float(thr))
    return best


def _best_split_sparse(Xn: sp.csr_matrix, yn: np.ndarray, n_classes: int,
                       parent_gini: float):
    """Best split over a CSR node submatrix, zeros handled implicitly.

    Candidate boundaries are enumerated between distinct values only, with
    the implicit zero block contributing one boundary value. Counts stay
    exact integers, so the chosen split agrees bit-for-bit with the dense
    kernel on the same data.
    """
    nn = Xn.shape[0]
    total_i = np.bincount(yn, minlength=n_classes)
    total = total_i.astype(np.float64)
    Xc = Xn.tocsc()
    occupied = np.flatnonzero(np.diff(Xc.indptr))
    best = (0.0, -1, 0.0)
    for j in occupied:
        lo, hi = Xc.indptr[j], Xc.indptr[j + 1]
        vals = Xc.data[lo:hi]
        cls = yn[Xc.indices[lo:hi]]
        n_zero = nn - vals.shape[0]
        uniq = np.unique(vals)
        if n_zero > 0:
            zpos = int(np.searchsorted(uniq, 0.0))
            uniq = np.insert(uniq, zpos, 0.0)
        if uniq.shape[0] < 2:
            continue
        counts = np.zeros((uniq.shape[0], n_classes))
        np.add.at(counts, (np.searchsorted(uniq, vals), cls), 1.0)
        if n_zero > 0:
            counts[zpos] += (total_i
                             - np.bincount(cls, minlength=n_classes))
        cum = np.cumsum(counts, axis=0)[:-1]
        left_n = cum.sum(axis=1)
        right_n = nn - left_n
        sum_sq_l = np.zeros(left_n.shape[0])
        sum_sq_r = np.zeros(left_n.shape[0])
        for c in range(n_classes):
            lc = cum[:, c]
            sum_sq_l += lc * lc
            rc = total[c] - lc
            sum_sq_r += rc * rc
        gini_l = 1.0 - sum_sq_l / (left_n * left_n)
        gini_r = 1.0 - sum_sq_r / (right_n * right_n)
        gain = parent_gini - (left_n * gini_l + right_n * gini_r) / nn
        t = int(np.argmax(gain))
        g = float(gain[t])
        if g > best[0]:
            thr = (uniq[t] + uniq[t + 1]) / 2.0
            best = (g, int(j), float(thr))
    return best


def _grow(access: _ColumnAccess, y_idx: np.ndarray, labels: list[str],
          params: TreeParams) -> list[TreeNode]:
    n_classes = len(labels)
    nodes: list[TreeNode] = []
    # stack of (node_slot, row_indices, depth)
    all_rows = np.arange(access.n)
    nodes.append(_make_node(y_idx, all_rows, labels))
    stack = [(0, all_rows, 0)]
    while stack:
        slot, rows, depth = stack.pop()
        node = nodes[slot]
        nn = rows.shape[0]
        if (depth >= params.max_depth or nn < max(2, params.min_samples_split)
                or node.impurity == 0.0):
            continue
        yn = y_idx[rows]
        sub = access.submatrix(rows)
        if access.sparse:
            gain, feat, thr = _best_split_sparse(sub, yn, n_classes,
                                                 node.impurity)
        else:
            gain, feat, thr = _best_split_dense(sub, yn, n_classes,
                                                node.impurity)
        if feat < 0 or gain <= 0.0:
            continue
        col = access.column_values(feat, rows)
        left_rows = rows[col <= thr]
        right_rows = rows[col > thr]
        if left_rows.shape[0] == 0 or right_rows.shape[0] == 0:
            continue
        node.feature = int(feat)
        node.threshold = float(thr)
        node.left = len(nodes)
        nodes.append(_make_node(y_idx, left_rows, labels))
        node.right = len(nodes)
        nodes.append(_make_node(y_idx, right_rows, labels))
        stack.append((node.left, left_rows, depth + 1))
        stack.append((node.right, right_rows, depth + 1))
    return nodes


def _make_node(y_idx: np.ndarray, rows: np.ndarray,
               labels: list[str]) -> TreeNode:
    counts = np.bincount(y_idx[rows], minlength=len(labels))
    return TreeNode(feature=None, threshold=None,
                    impurity=_gini(counts, rows.shape[0]),
                    class_counts=counts, left=None, right=None,
                    predicted_label=labels[int(np.argmax(counts))])


def _pruning_path(nodes: list[TreeNode]) -> list[tuple[float, frozenset[int]]]:
    """Weakest-link sequence: (effective alpha, nodes collapsed so far).

    Node cost is the sample-weighted Gini, matching the growth criterion.
    Leaf counts and subtree costs are maintained incrementally through
    parent pointers, and every node achieving the current minimum link
    strength collapses in the same step.
    """
    n = len(nodes)
    n_total = int(nodes[0].class_counts.sum())
    r_node = np.array([int(nd.class_counts.sum()) / n_total * nd.impurity
                       for nd in nodes])
    parent = np.full(n, -1, dtype=np.int64)
    for i, nd in enumerate(nodes):
        if not nd.is_leaf:
            parent[nd.left] = i
            parent[nd.right] = i
    n_leaves = np.ones(n, dtype=np.int64)
    cost = r_node.copy()
    for i in range(n - 1, -1, -1):  # children always follow their parent
        nd = nodes[i]
        if not nd.is_leaf:
            n_leaves[i] = n_leaves[nd.left] + n_leaves[nd.right]
            cost[i] = cost[nd.left] + cost[nd.right]

    alive = {i for i, nd in enumerate(nodes) if not nd.is_leaf}
    removed = np.zeros(n, dtype=bool)
    collapsed: set[int] = set()
    path: list[tuple[float, frozenset[int]]] = []

    while alive:
        g = {i: (r_node[i] - cost[i]) / (n_leaves[i] - 1) for i in alive}
        g_min = min(g.values())
        for i in sorted(i for i, v in g.items() if v <= g_min):
            if removed[i] or i in collapsed:
                continue
            stack = [nodes[i].left, nodes[i].right]
            while stack:
                t = stack.pop()
                removed[t] = True
                alive.discard(t)
                if not nodes[t].is_leaf:
                    stack.extend((nodes[t].left, nodes[t].right))
            collapsed.add(i)
            alive.discard(i)
            d_leaves = 1 - n_leaves[i]
            d_cost = r_node[i] - cost[i]
            n_leaves[i] = 1
            cost[i] = r_node[i]
            p = parent[i]
            while p != -1:
                n_leaves[p] += d_leaves
                cost[p] += d_cost
                p = parent[p]
        path.append((max(float(g_min), 0.0), frozenset(collapsed)))
    return path


def _collapse(nodes: list[TreeNode], cut: frozenset[int]) -> list[TreeNode]:
    """Materialize a pruned tree, re-indexing surviving nodes."""
    out: list[TreeNode] = []

    def copy(i: int) -> int:
        n = nodes[i]
        slot = len(out)
        if n.is_leaf or i in cut:
            out.append(TreeNode(None, None, n.impurity,
                                n.class_counts.copy(), None, None,
                                n.predicted_label))
            return slot
        out.append(TreeNode(n.feature, n.threshold, n.impurity,
                            n.class_counts.copy(), None, None,
                            n.predicted_label))
        out[slot].left = copy(n.left)
        out[slot].right = copy(n.right)
        return slot

    copy(0)
    return out


def _tree_at_alpha(nodes: list[TreeNode],
                   path: list[tuple[float, frozenset[int]]],
                   alpha: float) -> list[TreeNode]:
    cut: frozenset[int] = frozenset()
    for a_eff, cum in path:
        if a_eff <= alpha:
            cut = cum
        else:
            break
    return _collapse(nodes, cut) if cut else _collapse(nodes, frozenset())


def _predict_nodes(nodes: list[TreeNode], access: _ColumnAccess) -> list[str]:
    out = np.empty(access.n, dtype=object)
    stack = [(0, np.arange(access.n))]
    while stack:
        slot, rows = stack.pop()
        if rows.shape[0] == 0:
            continue
        node = nodes[slot]
        if node.is_leaf:
            out[rows] = node.predicted_label
            continue
        col = access.column_values(node.feature, rows)
        mask = col <= node.threshold
        stack.append((node.left, rows[mask]))
        stack.append((node.right, rows[~mask]))
    return list(out)


def train_dtree(X, y: list[str], params: TreeParams | None = None,
                cv_folds: int = 10, seed: int = 0) -> DecisionTreeModel:
    """Fit a CART classifier, tuning the pruning strength by CV.

    With ``params.ccp_alpha`` set the CV search is skipped and the tree
    is grown and pruned at that value directly.
    """
    params = params or TreeParams()
    labels = sorted(set(y))
    if len(labels) < 2:
        raise SingleClassError(f"need >= 2 classes, got {labels}")
    if X.shape[0] != len(y):
        raise DimensionMismatchError(
            f"X has {X.shape[0]} rows, y has {len(y)} labels")
    if cv_folds < 2:
        raise ValueError(f"cv_folds must be >= 2, got {cv_folds}")
    lab_to_idx = {lab: i for i, lab in enumerate(labels)}
    y_idx = np.asarray([lab_to_idx[lab] for lab in y], dtype=np.int64)
    access = _ColumnAccess(X)
    positive = labels[-1]

    cv_scores: dict[float, float] = {}
    if params.ccp_alpha is None:
        fold_f1 = {a: [] for a in CCP_ALPHA_GRID}
        folds = kfold_indices(len(y), cv_folds, seed, stratify_labels=y)
        all_idx = np.arange(len(y))
        for test_idx in folds:
            test_mask = np.zeros(len(y), dtype=bool)
            test_mask[test_idx] = True
            tr = all_idx[~test_mask]
            te = all_idx[test_mask]
            Xtr = access.submatrix(tr)
            tr_access = _ColumnAccess(Xtr)
            grown = _grow(tr_access, y_idx[tr], labels, params)
            path = _pruning_path(grown)
            te_access = _ColumnAccess(access.submatrix(te))
            y_te = [y[i] for i in te]
            for a in CCP_ALPHA_GRID:
                pruned = _tree_at_alpha(grown, path, a)
                pred = _predict_nodes(pruned, te_access)
                frag = metrics(confusion(y_te, pred, positive))
                fold_f1[a].append(frag.f1)
        cv_scores = {a: float(np.mean(v)) for a, v in fold_f1.items()}
        best_alpha = max(CCP_ALPHA_GRID, key=lambda a: (cv_scores[a], -a))
    else:
        best_alpha = params.ccp_alpha

    grown = _grow(access, y_idx, labels, params)
    path = _pruning_path(grown)
    final = _tree_at_alpha(grown, path, best_alpha)
    return DecisionTreeModel(nodes=final, params=params, label_order=labels,
                             chosen_alpha=best_alpha, cv_mean_f1=cv_scores)


def predict_dtree(model: DecisionTreeModel, X) -> list[str]:
    """Root-to-leaf traversal; a value equal to the threshold goes left."""
    access = _ColumnAccess(X)
    feat_needed = max((n.feature for n in model.nodes
                       if n.feature is not None), default=-1)
    if feat_needed >= access.n_features:
        raise DimensionMismatchError(
            f"model splits on feature {feat_needed}, X has only "
            f"{access.n_features} columns")
    return _predict_nodes(model.nodes, access)


@dataclass(frozen=True)
class FeatureImportanceReport:
    """Features that appear in splits, ranked by normalized importance."""

    ranking: tuple[tuple[str, float], ...]

    def to_dict(self) -> dict:
        return {"ranking": [{"featureName": n, "importance": v}
                            for n, v in self.ranking]}


def feature_importance(model: DecisionTreeModel,
                       names: list[str]) -> FeatureImportanceReport:
    """Sample-fraction-weighted impurity decrease per split feature.

    Importances are normalized to sum to 1; a stump yields an empty
    ranking. Ties order lexicographically by feature name.
    """
    n_features = len(names)
    nodes = model.nodes
    n_total = int(nodes[0].class_counts.sum())
    raw = np.zeros(n_features)
    for node in nodes:
        if node.is_leaf:
            continue
        if node.feature >= n_features:
            raise DimensionMismatchError(
                f"model splits on feature {node.feature}, only "
                f"{n_features} names given")
        left = nodes[node.left]
        right = nodes[node.right]
        nn = int(node.class_counts.sum())
        nl = int(left.class_counts.sum())
        nr = int(right.class_counts.sum())
        decrease = node.impurity - (nl * left.impurity
                                    + nr * right.impurity) / nn
        raw[node.feature] += (nn / n_total) * decrease
    total = raw.sum()
    if total <= 0:
        return FeatureImportanceReport(ranking=())
    norm = raw / total
    order = sorted(np.flatnonzero(norm > 0),
                   key=lambda j: (-norm[j], names[j]))
    return FeatureImportanceReport(
        ranking=tuple((names[j], float(norm[j])) for j in order))
