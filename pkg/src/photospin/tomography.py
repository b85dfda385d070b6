"""Pauli-basis qubit tomography: settings, Poisson counts, reconstruction, Monte Carlo errors."""

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# rows: outcome 0 (+1 eigenvalue), outcome 1 (-1 eigenvalue), as bras
_MEASURE = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "Y": np.array([[1, -1j], [1, 1j]], dtype=complex) / np.sqrt(2),
    "Z": np.eye(2, dtype=complex),
}


@dataclass(frozen=True)
class MeasurementSetting:
    bases: str

    def __post_init__(self):
        if not self.bases or any(b not in "XYZ" for b in self.bases):
            raise ValueError(f"bases must be a nonempty string over XYZ, got {self.bases!r}")

    @property
    def n_qubits(self):
        return len(self.bases)

    def outcomes(self):
        return ["".join(bits) for bits in product("01", repeat=self.n_qubits)]

    def rotation(self):
        """Rows are the outcome bras, in :meth:`outcomes` order."""
        U = np.ones((1, 1), dtype=complex)
        for b in self.bases:
            U = np.kron(U, _MEASURE[b])
        return U

    def projectors(self):
        U = self.rotation()
        return [np.outer(U[k].conj(), U[k]) for k in range(U.shape[0])]


def build_settings(n):
    if n < 1:
        raise ValueError("need at least one qubit")
    return [MeasurementSetting("".join(b)) for b in product("XYZ", repeat=n)]


def probabilities(rho, settings):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    out = np.empty((len(settings), rho.shape[0]))
    for k, s in enumerate(settings):
        U = s.rotation()
        out[k] = np.einsum("ij,jk,ik->i", U, rho, U.conj()).real
    return np.clip(out, 0.0, None)


@dataclass(frozen=True)
class CountsTable:
    settings: tuple
    counts: np.ndarray  # (n_settings, 2**n) int64
    events: int
    seed: int = None

    @property
    def n_qubits(self):
        return self.settings[0].n_qubits

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# seed={self.seed} events={self.events} n_qubits={self.n_qubits}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["setting_id", "basis_string", "outcome_string", "count"])
        for k, s in enumerate(self.settings):
            for j, o in enumerate(s.outcomes()):
                w.writerow([k, s.bases, o, int(self.counts[k, j])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing '# seed=... events=...' header row")
        meta = dict(item.split("=", 1) for item in lines[0][1:].split())
        rows = list(csv.DictReader(lines[1:]))
        order, table = [], {}
        for r in rows:
            sid = int(r["setting_id"])
            if sid not in table:
                order.append((sid, r["basis_string"]))
                table[sid] = {}
            table[sid][r["outcome_string"]] = int(r["count"])
        settings = tuple(MeasurementSetting(b) for _, b in sorted(order))
        counts = np.array([[table[sid][o] for o in s.outcomes()] for (sid, _), s in zip(sorted(order), settings)])
        seed = None if meta.get("seed") in (None, "None") else int(meta["seed"])
        return cls(settings, counts.astype(np.int64), int(meta["events"]), seed)


def simulate_counts(rho, settings, events, seed):
    """Independent Poisson(``events * p``) counts for every outcome of every setting."""
    if events < 1:
        raise ValueError("events per setting must be >= 1")
    p = probabilities(rho, settings)
    rng = np.random.default_rng(seed)
    return CountsTable(tuple(settings), rng.poisson(events * p).astype(np.int64), int(events), seed)


@lru_cache(maxsize=None)
def _pauli_design(bases_tuple):
    """For each Pauli string: contributing (setting, sign-vector) pairs."""
    n = len(bases_tuple[0])
    outcomes = np.array(list(product((0, 1), repeat=n)))  # (2**n, n)
    design = {}
    for label in product("IXYZ", repeat=n):
        label = "".join(label)
        support = [q for q, c in enumerate(label) if c != "I"]
        rows = []
        for k, bases in enumerate(bases_tuple):
            if all(bases[q] == label[q] for q in support):
                rows.append(k)
        signs = (-1.0) ** outcomes[:, support].sum(axis=1) if support else np.ones(len(outcomes))
        design[label] = (rows, signs)
    return design


def _pauli_matrix(label):
    m = np.ones((1, 1), dtype=complex)
    for c in label:
        m = np.kron(m, PAULI[c])
    return m


def linear_inversion(freqs, settings):
    """Density-matrix estimate from per-setting outcome frequencies."""
    design = _pauli_design(tuple(s.bases for s in settings))
    n = settings[0].n_qubits
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    for label, (rows, signs) in design.items():
        if not rows:
            raise ValueError(f"settings are not informationally complete: no data for {label}")
        rho += float(np.mean(freqs[rows] @ signs)) * _pauli_matrix(label)
    return rho / (1 << n)


def project_to_density(m):
    """Frobenius-nearest unit-trace PSD matrix (eigenvalues projected onto the simplex)."""
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.nonzero(u - css / np.arange(1, u.size + 1) > 0)[0][-1]
    shift = css[k] / (k + 1)
    w = np.clip(w - shift, 0.0, None)
    return (v * w) @ v.conj().T


def reconstruct(counts):
    if len({s.n_qubits for s in counts.settings}) != 1:
        raise ValueError("settings disagree on qubit number")
    totals = counts.counts.sum(axis=1, keepdims=True).astype(float)
    freqs = np.divide(counts.counts, totals, out=np.zeros(counts.counts.shape), where=totals > 0)
    if np.any(totals == 0):
        raise ValueError("a setting recorded no events")
    return project_to_density(linear_inversion(freqs, counts.settings))


def reconstruct_from_probabilities(probs, settings):
    return project_to_density(linear_inversion(np.asarray(probs, dtype=float), settings))


def monte_carlo_uncertainty(counts, resamples, functional, seed):
    """Mean and sample standard deviation of ``functional(rho)`` over Poisson resamples.

    Resample ``r`` draws from its own child of ``SeedSequence(seed)``, so the
    result does not depend on evaluation order.
    """
    if resamples < 2:
        raise ValueError("need at least two resamples")
    children = np.random.SeedSequence(seed).spawn(resamples)
    values = np.empty(resamples)
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        sample = CountsTable(counts.settings, rng.poisson(counts.counts), counts.events, seed)
        values[r] = functional(reconstruct(sample))
    return float(values.mean()), float(values.std(ddof=1))

