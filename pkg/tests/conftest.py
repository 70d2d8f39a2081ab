import numpy as np
import pytest

from rfda_sketch import center_and_membership, geometric_spectrum, synthesize_dataset, thin_svd


def random_centered(n, d, c, seed, rank=None):
    rng = np.random.default_rng(seed)
    if rank is None:
        raw = rng.standard_normal((n, d))
    else:
        raw = rng.standard_normal((n, rank)) @ rng.standard_normal((rank, d))
    labels = np.arange(n) % c
    return center_and_membership(raw, labels)


@pytest.fixture(scope="session")
def synth_rank20():
    raw, labels = synthesize_dataset(100, 1000, 4, geometric_spectrum(20, 10.0, 0.8), 1.0, seed=0)
    ds = center_and_membership(raw, labels)
    return ds, thin_svd(ds.a)


@pytest.fixture(scope="session")
def synth_rank10():
    raw, labels = synthesize_dataset(60, 400, 3, geometric_spectrum(10, 5.0, 0.8), 1.0, seed=3)
    ds = center_and_membership(raw, labels)
    return ds, thin_svd(ds.a)


def dataset_from_matrix(a, labels):
    """Wrap an arbitrary (not necessarily centered) matrix as a dataset."""
    from rfda_sketch import CenteredDataset
    from rfda_sketch.data import membership_matrix
    labels = np.asarray(labels)
    omega, counts = membership_matrix(labels, int(labels.max()) + 1)
    return CenteredDataset(np.asarray(a, dtype=float), np.zeros(a.shape[1]), labels, counts, omega)


ACCEPTANCE_LINES = []


def record(label, ok, detail):
    """Log one acceptance criterion as a PASS/FAIL line and return ``ok``."""
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
