import numpy as np
import pytest

from toepcov.core import FrequencyModel, ToeplitzVector, synthesize


def toeplitz_oracle(a: np.ndarray) -> np.ndarray:
    """Dense Toeplitz matrix via scipy (independent of toepcov.densify)."""
    import scipy.linalg

    return scipy.linalg.toeplitz(np.asarray(a, dtype=np.float64))


def avg_oracle(m: np.ndarray) -> np.ndarray:
    """Diagonal averages by explicit double loop (independent of bincount)."""
    m = np.asarray(m)
    d = m.shape[0]
    out = np.zeros(d, dtype=m.dtype)
    for s in range(d):
        acc = []
        for j in range(d):
            for k in range(d):
                if abs(j - k) == s:
                    acc.append(m[j, k])
        out[s] = sum(acc) / len(acc)
    return out


def synthesize_oracle(fm: FrequencyModel) -> np.ndarray:
    """Diagonal values of F_S D F_S* by the full matrix product."""
    d = fm.d
    f = np.exp(-2j * np.pi * np.outer(np.arange(d), fm.freqs))
    t = f @ np.diag(fm.weights.astype(np.complex128)) @ f.conj().T
    assert np.abs(t.imag).max() < 1e-9 * max(1.0, np.abs(t.real).max())
    return t.real[:, 0].copy()


def random_closed_model(d: int, pairs: int, rng: np.random.Generator,
                        self_paired: bool = False, min_sep: float = 0.02) -> FrequencyModel:
    """A conjugate-closed frequency model with weights drawn uniformly."""
    freqs: list[float] = []
    if self_paired:
        freqs.append(0.0)
    tries = 0
    while len(freqs) < 2 * pairs + int(self_paired):
        tries += 1
        assert tries < 10000, "could not place frequencies at this separation"
        f = float(rng.uniform(min_sep, 0.5 - min_sep))
        cand = [f, 1.0 - f]
        if all(min(abs(c - g), 1 - abs(c - g)) >= min_sep for c in cand for g in freqs):
            freqs.extend(cand)
    weights = np.empty(len(freqs))
    if self_paired:
        weights[0] = rng.uniform(0.2, 2.0)
    base = int(self_paired)
    for i in range(base, len(freqs), 2):
        weights[i] = weights[i + 1] = rng.uniform(0.2, 2.0)
    return FrequencyModel(d, np.asarray(freqs), weights)


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


def relative_spectral_error(t_hat: ToeplitzVector, t: ToeplitzVector) -> float:
    """Oracle relative error: exact eigensolves, no power iteration."""
    delta = np.abs(np.linalg.eigvalsh(toeplitz_oracle((t_hat - t).a))).max()
    scale = np.abs(np.linalg.eigvalsh(toeplitz_oracle(t.a))).max()
    return float(delta / scale)


def model_truth(d: int, freqs, weights) -> ToeplitzVector:
    return synthesize(FrequencyModel(d, np.asarray(freqs), np.asarray(weights)))
