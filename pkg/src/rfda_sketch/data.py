"""Dataset preparation: centering, class membership, splits, synthetic data, CSV."""
import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (BadSpectrum, ClassTooSmall, EmptyClass, MissingLabelColumn,
                     ParseError, ShapeMismatch)
from .linalg import as_matrix


@dataclass(frozen=True)
class CenteredDataset:
    """Mean-centered data ``a`` with its grand mean and rescaled membership matrix.

    ``omega[i, j] = 1/sqrt(n_j)`` when sample ``i`` belongs to class ``j``, so
    ``omega.T @ omega`` is the identity.
    """

    a: np.ndarray
    grand_mean: np.ndarray
    labels: np.ndarray
    class_counts: np.ndarray
    omega: np.ndarray

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def d(self):
        return self.a.shape[1]

    @property
    def c(self):
        return self.omega.shape[1]


@dataclass(frozen=True)
class HeldOut:
    """Test rows of a split; ``a`` is centered with the training grand mean.

    ``indices`` are the test rows of the original matrix and ``train_indices``
    the complementary training rows.
    """

    raw: np.ndarray
    a: np.ndarray
    labels: np.ndarray
    indices: np.ndarray
    train_indices: np.ndarray


def membership_matrix(labels, c):
    labels = np.asarray(labels)
    counts = np.bincount(labels, minlength=c)
    omega = np.zeros((labels.shape[0], c))
    omega[np.arange(labels.shape[0]), labels] = 1.0 / np.sqrt(counts[labels])
    return omega, counts


def _check_labels(labels, n, num_classes=None):
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != n:
        raise ShapeMismatch(f"got {labels.shape[0] if labels.ndim == 1 else labels.shape} "
                            f"labels for {n} rows")
    if not np.issubdtype(labels.dtype, np.integer):
        if not np.all(np.equal(np.mod(labels, 1), 0)):
            raise ValueError("labels must be integer class ids")
        labels = labels.astype(np.int64)
    if labels.size and labels.min() < 0:
        raise ValueError("class ids must be non-negative")
    c = int(labels.max()) + 1 if num_classes is None else int(num_classes)
    counts = np.bincount(labels, minlength=c)
    if counts.shape[0] > c:
        raise ValueError(f"class id {labels.max()} out of range for {c} classes")
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise EmptyClass(f"class {int(missing[0])} has no member")
    return labels.astype(np.int64), c


def center_and_membership(raw, labels, num_classes=None):
    """Center ``raw`` on its column means and build the membership matrix."""
    raw = as_matrix(raw)
    n = raw.shape[0]
    if n < 2:
        raise ShapeMismatch("need at least two rows")
    labels, c = _check_labels(labels, n, num_classes)
    mean = raw.mean(axis=0)
    a = raw - mean
    omega, counts = membership_matrix(labels, c)
    return CenteredDataset(a, mean, labels, counts, omega)


def stratified_split(raw, labels, train_frac, seed):
    """Split rows per class; both parts are centered with the training mean.

    Returns ``(train, test)`` where ``train`` is a CenteredDataset and ``test``
    a HeldOut.
    """
    if not 0 < train_frac < 1:
        raise ValueError("train_frac must lie in (0, 1)")
    raw = as_matrix(raw)
    labels, c = _check_labels(labels, raw.shape[0])
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for j in range(c):
        members = np.flatnonzero(labels == j)
        n_train = math.floor(train_frac * members.size + 0.5)
        if members.size < 2:
            raise ClassTooSmall(f"class {j} has {members.size} member(s); cannot appear in both splits")
        n_train = min(max(n_train, 1), members.size - 1)
        members = rng.permutation(members)
        train_idx.append(members[:n_train])
        test_idx.append(members[n_train:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    train = center_and_membership(raw[train_idx], labels[train_idx], c)
    test_raw = raw[test_idx]
    test = HeldOut(test_raw, test_raw - train.grand_mean, labels[test_idx], test_idx, train_idx)
    return train, test


def geometric_spectrum(rank, top=10.0, decay=0.8):
    """Singular values ``top * decay**i`` for ``i < rank``."""
    return top * decay ** np.arange(rank)


def _orthonormal_columns(x):
    q, r = np.linalg.qr(x)
    # fix the sign ambiguity of QR so results do not depend on the LAPACK build
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def synthesize_dataset(n, d, c, spectrum, class_sep, seed, coherence=0.0):
    """Raw data whose centered matrix has singular values ``spectrum``.

    The centered part is ``U diag(spectrum) V^T`` with ``U`` orthogonal to the
    all-ones vector. The leading ``c - 1`` columns of ``U`` are tilted towards
    the centered class indicators by ``class_sep``; ``coherence`` > 0 weights
    the rows of ``V`` by ``(i+1)**-coherence`` before orthonormalizing, which
    concentrates the leverage scores on few features.

    Returns ``(raw, labels)``.
    """
    spectrum = np.asarray(spectrum, dtype=float)
    r = spectrum.shape[0]
    if spectrum.ndim != 1 or r == 0 or np.any(spectrum <= 0) or np.any(np.diff(spectrum) > 0):
        raise BadSpectrum("spectrum must be positive and non-increasing")
    if n < 2 * c or d < n:
        raise ValueError("need n >= 2c and d >= n")
    if r > min(n - 1, d - 1):
        raise BadSpectrum(f"spectrum length {r} exceeds min(n-1, d-1)")
    rng = np.random.default_rng(seed)

    labels = rng.permutation(np.arange(n) % c)

    noise = rng.standard_normal((n, r))
    noise -= noise.mean(axis=0)
    noise /= np.linalg.norm(noise, axis=0)
    m = min(r, c - 1)
    if class_sep > 0 and m > 0:
        indicators = (labels[:, None] == np.arange(c)).astype(float)
        indicators -= indicators.mean(axis=0)
        basis = _orthonormal_columns(indicators[:, :c - 1])
        noise[:, :m] += class_sep * basis[:, :m]
    u = _orthonormal_columns(noise)
    u -= u.mean(axis=0)  # remove round-off along the all-ones direction

    weights = (1.0 + rng.permutation(d)) ** (-float(coherence))
    v = _orthonormal_columns(rng.standard_normal((d, r)) * weights[:, None])

    offset = rng.standard_normal(d)
    raw = (u * spectrum) @ v.T + offset
    return raw, labels


def load_csv(path, label_column):
    """Read a headed, comma-delimited file into ``(features, labels)``.

    Labels are re-indexed to ``0..c-1`` in order of first appearance.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file", row=1) from None
        header = [h.strip() for h in header]
        if isinstance(label_column, str) and label_column in header:
            label_idx = header.index(label_column)
        else:
            try:
                label_idx = int(label_column)
            except (TypeError, ValueError):
                raise MissingLabelColumn(f"no column named {label_column!r}") from None
            if not 0 <= label_idx < len(header):
                raise MissingLabelColumn(f"label column index {label_idx} out of range")
        feature_idx = [i for i in range(len(header)) if i != label_idx]

        rows, raw_labels = [], []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ParseError(f"{path}:{line_no}: expected {len(header)} fields, got {len(record)}",
                                 row=line_no)
            values = []
            for i in feature_idx:
                try:
                    x = float(record[i])
                except ValueError:
                    x = math.nan
                if not math.isfinite(x):
                    raise ParseError(f"{path}: row {line_no}, column {header[i]!r}: "
                                     f"cannot parse {record[i]!r} as a finite number",
                                     row=line_no, column=header[i])
                values.append(x)
            rows.append(values)
            raw_labels.append(record[label_idx].strip())

    ids = {}
    labels = np.array([ids.setdefault(lab, len(ids)) for lab in raw_labels], dtype=np.int64)
    features = np.array(rows, dtype=float).reshape(len(rows), len(feature_idx))
    return features, labels
