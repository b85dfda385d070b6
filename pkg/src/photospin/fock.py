"""Multimode Fock states, the tunable directional coupler and coincidence post-selection.

A :class:`PhotonicState` is a sparse map from canonical occupation tuples to
amplitudes over normalised Fock basis states. Linear optics acts by substituting
creation operators, so :meth:`PhotonicState.transform` expands each term as a
monomial in ``a^dagger`` and re-collects it.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from math import factorial, sqrt

import numpy as np

PRUNE = 1e-14
UNDERFLOW = 1e-24
POLARIZATIONS = ("H", "V")


class PostselectionError(ValueError):
    """Post-selection failed."""


class ZeroProbabilityError(PostselectionError):
    """No term of the state survives the requested coincidence pattern."""


class UnderflowError(PostselectionError):
    """Terms survive but their total weight is below floating-point resolution."""


@dataclass(frozen=True, order=True)
class ModeLabel:
    spatial: str
    pol: str = "H"
    internal: int = 0

    def __post_init__(self):
        object.__setattr__(self, "spatial", str(self.spatial))
        if self.pol not in POLARIZATIONS:
            raise ValueError(f"polarisation must be H or V, got {self.pol!r}")


def _fock_key(modes):
    """Occupation tuple ``((mode, count), ...)`` for a multiset of modes."""
    counts = defaultdict(int)
    for m in modes:
        counts[m] += 1
    return tuple(sorted(counts.items()))


class PhotonicState:
    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, amp in (terms or {}).items():
            amp = complex(amp)
            if abs(amp) >= PRUNE:
                clean[tuple(sorted(key))] = clean.get(tuple(sorted(key)), 0) + amp
        self._terms = {k: v for k, v in sorted(clean.items()) if abs(v) >= PRUNE}

    @classmethod
    def vacuum(cls):
        return cls({(): 1.0})

    @classmethod
    def from_monomials(cls, monomials):
        """State ``sum_k c_k prod(a^dagger) |0>`` from ``[(c_k, [ModeLabel, ...]), ...]``."""
        terms = defaultdict(complex)
        for coeff, modes in monomials:
            key = _fock_key(modes)
            norm = sqrt(np.prod([factorial(c) for _, c in key])) if key else 1.0
            terms[key] += coeff * norm
        return cls(terms)

    @property
    def terms(self):
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __add__(self, other):
        terms = defaultdict(complex, self._terms)
        for k, v in other._terms.items():
            terms[k] += v
        return PhotonicState(terms)

    def __mul__(self, scalar):
        return PhotonicState({k: v * scalar for k, v in self._terms.items()})

    __rmul__ = __mul__

    def inner(self, other):
        return sum(np.conj(v) * other._terms.get(k, 0) for k, v in self._terms.items())

    def norm(self):
        return sqrt(sum(abs(v) ** 2 for v in self._terms.values()))

    def photon_numbers(self):
        return {sum(c for _, c in key) for key in self._terms}

    def photon_number(self):
        numbers = self.photon_numbers()
        if len(numbers) != 1:
            raise ValueError(f"state mixes photon numbers {sorted(numbers)}")
        return numbers.pop()

    def modes(self):
        return sorted({m for key in self._terms for m, _ in key})

    def spatial_modes(self):
        return sorted({m.spatial for m in self.modes()})

    def tensor(self, other):
        """Product state; the two factors must occupy disjoint modes."""
        if set(self.modes()) & set(other.modes()):
            raise ValueError("tensor factors share modes")
        terms = defaultdict(complex)
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                terms[tuple(sorted(ka + kb))] += va * vb
        return PhotonicState(terms)

    def transform(self, substitution):
        """Apply ``a_m^dagger -> sum_k u_k b_k^dagger`` for modes in ``substitution``.

        ``substitution`` maps a :class:`ModeLabel` to ``[(ModeLabel, amplitude), ...]``;
        unmapped modes pass through unchanged.
        """
        out = defaultdict(complex)
        for key, amp in self._terms.items():
            ops = [m for m, c in key for _ in range(c)]
            norm_in = np.prod([factorial(c) for _, c in key]) if key else 1
            images = [substitution.get(m, [(m, 1.0)]) for m in ops]
            for choice in product(*images):
                coeff = amp / sqrt(norm_in)
                for _, u in choice:
                    coeff *= u
                new_key = _fock_key(m for m, _ in choice)
                norm_out = np.prod([factorial(c) for _, c in new_key]) if new_key else 1
                out[new_key] += coeff * sqrt(norm_out)
        return PhotonicState(out)

    def __repr__(self):
        return f"PhotonicState({len(self._terms)} terms)"


def single_photon(spatial, pol="H", internal=None):
    """One photon; ``internal`` optionally maps temporal bin -> amplitude."""
    internal = {0: 1.0} if internal is None else internal
    return PhotonicState.from_monomials(
        [(amp, [ModeLabel(spatial, pol, b)]) for b, amp in internal.items()]
    )


# ------------------------------------------------------------------ coupler


def theta_from_reflectivity(eta):
    eta = _check_eta(eta)
    return float(np.arctan(np.sqrt(eta)))


def reflectivity_from_theta(theta):
    if not 0 <= theta <= np.pi / 4 + 1e-15:
        raise ValueError("theta must lie in [0, pi/4]")
    return float(min(np.tan(theta) ** 2, 1.0))


def _check_eta(eta):
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"reflectivity must lie in [0, 1], got {eta}")
    return eta


def ideal_hom_visibility(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any((eta < 0) | (eta > 1)):
        raise ValueError("reflectivity must lie in [0, 1]")
    v = 2 * eta * (1 - eta) / (1 - 2 * eta + 2 * eta**2)
    return float(v) if v.ndim == 0 else v


@dataclass(frozen=True)
class TdcSetting:
    """Coupler with reflectivity ``eta``.

    ``convention``: ``"symmetric"`` puts ``i`` on reflection, ``"real"`` uses the
    real orthogonal matrix. ``swap_ports`` exchanges which output counts as
    reflected.
    """

    eta: float
    convention: str = "symmetric"
    swap_ports: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eta", _check_eta(self.eta))
        if self.convention not in ("symmetric", "real"):
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def theta(self):
        return theta_from_reflectivity(self.eta)

    def matrix(self):
        """Rows: inputs (a, b); columns: outputs (c, d)."""
        t, r = sqrt(1 - self.eta), sqrt(self.eta)
        if self.swap_ports:
            t, r = r, t
        if self.convention == "symmetric":
            return np.array([[t, 1j * r], [1j * r, t]])
        return np.array([[t, r], [-r, t]])


def apply_tdc(state, in_a, in_b, setting, out=None):
    """Send spatial modes ``in_a``/``in_b`` through the coupler into ``out`` (default: same names)."""
    in_a, in_b = str(in_a), str(in_b)
    out_c, out_d = (in_a, in_b) if out is None else (str(out[0]), str(out[1]))
    # an empty input port is fine (vacuum); a coupler with neither port occupied is a typo
    if not {in_a, in_b} & set(state.spatial_modes()):
        raise KeyError(f"neither {in_a!r} nor {in_b!r} is a mode of the state")
    if in_a == in_b:
        raise ValueError("coupler inputs must differ")
    U = setting.matrix()
    substitution = {}
    for mode in state.modes():
        if mode.spatial in (in_a, in_b):
            row = U[0] if mode.spatial == in_a else U[1]
            substitution[mode] = [
                (ModeLabel(out_c, mode.pol, mode.internal), row[0]),
                (ModeLabel(out_d, mode.pol, mode.internal), row[1]),
            ]
    return state.transform(substitution)


# ----------------------------------------------------------- post-selection


def _coincidence_terms(state, pattern):
    pattern = [str(p) for p in pattern]
    if len(set(pattern)) != len(pattern):
        raise ValueError("pattern modes must be distinct")
    present = set(state.spatial_modes())
    missing = [p for p in pattern if p not in present]
    if missing:
        raise KeyError(f"pattern modes {missing} not in state")
    if max(state.photon_numbers(), default=0) < len(pattern):
        raise ValueError("fewer photons than pattern modes")
    kept = []
    for key, amp in state:
        by_spatial = defaultdict(list)
        for m, c in key:
            by_spatial[m.spatial].extend([m] * c)
        if all(len(by_spatial.get(p, ())) == 1 for p in pattern) and sum(
            len(v) for v in by_spatial.values()
        ) == len(pattern):
            kept.append(([by_spatial[p][0] for p in pattern], amp))
    return kept


def coincidence_probability(state, pattern):
    """Weight of the exactly-one-photon-per-pattern-mode component."""
    return float(sum(abs(a) ** 2 for _, a in _coincidence_terms(state, pattern)))


def postselected_density(state, pattern):
    """(probability, polarisation density matrix) with internal bins traced out."""
    kept = _coincidence_terms(state, pattern)
    n = len(pattern)
    by_internal = defaultdict(lambda: np.zeros(1 << n, dtype=complex))
    for modes, amp in kept:
        idx = sum((POLARIZATIONS.index(m.pol)) << (n - 1 - k) for k, m in enumerate(modes))
        by_internal[tuple(m.internal for m in modes)][idx] += amp
    rho = sum(np.outer(v, v.conj()) for v in by_internal.values()) if by_internal else None
    prob = float(np.real(np.trace(rho))) if rho is not None else 0.0
    if prob == 0.0:
        return 0.0, None
    if prob < UNDERFLOW:
        raise UnderflowError(f"post-selection weight {prob:.3e} underflows")
    return prob, rho / prob


def coincidence_postselect(state, pattern):
    """Project onto one photon per pattern mode.

    Returns ``(probability, conditional)`` where ``conditional`` is the
    renormalised n-qubit polarisation vector (qubit k = pattern[k], ``H`` = 0).
    A pattern nothing survives gives ``(0.0, None)``; a positive weight below
    :data:`UNDERFLOW` raises :class:`UnderflowError`.
    """
    kept = _coincidence_terms(state, pattern)
    n = len(pattern)
    if not kept:
        return 0.0, None
    internal = {tuple(m.internal for m in modes) for modes, _ in kept}
    if len(internal) > 1:
        raise PostselectionError("polarisation is entangled with internal bins; use postselected_density")
    vec = np.zeros(1 << n, dtype=complex)
    for modes, amp in kept:
        idx = sum(POLARIZATIONS.index(m.pol) << (n - 1 - k) for k, m in enumerate(modes))
        vec[idx] += amp
    prob = float(np.vdot(vec, vec).real)
    if prob == 0.0:
        return 0.0, None
    if prob < UNDERFLOW:
        raise UnderflowError(f"post-selection weight {prob:.3e} underflows")
    return prob, vec / sqrt(prob)


# ------------------------------------------------------------------ sources

PAIR_KINDS = ("psi-", "psi+", "phi+", "phi-", "HV")


@dataclass(frozen=True)
class PairSource:
    kind: str
    mode_1: str
    mode_2: str

    def __post_init__(self):
        if self.kind not in PAIR_KINDS:
            raise ValueError(f"pair kind must be one of {PAIR_KINDS}")
        object.__setattr__(self, "mode_1", str(self.mode_1))
        object.__setattr__(self, "mode_2", str(self.mode_2))
        if self.mode_1 == self.mode_2:
            raise ValueError("pair modes must differ")

    def state(self):
        a, b = self.mode_1, self.mode_2
        s = 1 / sqrt(2)
        terms = {
            "psi-": [(s, "H", "V"), (-s, "V", "H")],
            "psi+": [(s, "H", "V"), (s, "V", "H")],
            "phi+": [(s, "H", "H"), (s, "V", "V")],
            "phi-": [(s, "H", "H"), (-s, "V", "V")],
            "HV": [(1.0, "H", "V")],
        }[self.kind]
        return PhotonicState.from_monomials(
            [(c, [ModeLabel(a, pa), ModeLabel(b, pb)]) for c, pa, pb in terms]
        )


@dataclass(frozen=True)
class SourceConfig:
    pairs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        modes = [m for p in self.pairs for m in (p.mode_1, p.mode_2)]
        if len(set(modes)) != len(modes):
            raise ValueError("source modes must be distinct")

    @classmethod
    def two_singlets(cls):
        return cls((PairSource("psi-", "1", "2"), PairSource("psi-", "3", "4")))

    @classmethod
    def singlet_and_product(cls):
        return cls((PairSource("psi-", "1", "2"), PairSource("HV", "3", "4")))

    def state(self):
        out = PhotonicState.vacuum()
        for p in self.pairs:
            out = out.tensor(p.state())
        return out


def simulate_postselected_state(sources, setting, interfering=("1", "3"), pattern=("1", "2", "3", "4")):
    """Sources -> coupler on ``interfering`` -> fourfold coincidence in ``pattern``."""
    state = sources.state()
    n_photons = state.photon_number()
    if n_photons != len(pattern):
        raise ValueError(f"sources emit {n_photons} photons for a {len(pattern)}-mode pattern")
    out = apply_tdc(state, interfering[0], interfering[1], setting)
    prob, vec = coincidence_postselect(out, pattern)
    if vec is None:
        raise ZeroProbabilityError("configuration never produces the coincidence pattern")
    return prob, vec


# -------------------------------------------------------------- HOM model


@dataclass(frozen=True)
class HomDipModel:
    sigma: float
    vsys: float = 1.0
    baseline: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 <= self.vsys <= 1:
            raise ValueError("vsys must lie in [0, 1]")


def temporal_overlap(delay, sigma):
    return np.exp(-np.asarray(delay, dtype=float) ** 2 / (2 * sigma**2))


def hom_dip_curve(eta, delays, model):
    """Rows ``(delay, rate)`` of expected coincidence rate versus relative delay."""
    delays = np.asarray(delays, dtype=float)
    s = temporal_overlap(delays, model.sigma)
    rate = model.baseline * (1 - model.vsys * ideal_hom_visibility(eta) * s**2)
    return np.column_stack([delays, rate])


def hom_pair_state(delay, sigma, pol="H"):
    """Photons in modes a and b whose temporal bins overlap by ``exp(-delay^2/2 sigma^2)``."""
    s = float(temporal_overlap(delay, sigma))
    first = single_photon("a", pol)
    second = single_photon("b", pol, {0: s, 1: sqrt(max(0.0, 1 - s * s))})
    return first.tensor(second)


def simulated_visibility(eta, convention="symmetric", swap_ports=False):
    """``1 - P_coinc(0) / P_coinc(inf)`` from the Fock simulation."""
    setting = TdcSetting(eta, convention, swap_ports)
    near = coincidence_probability(apply_tdc(hom_pair_state(0.0, 1.0), "a", "b", setting), ("a", "b"))
    far = coincidence_probability(apply_tdc(hom_pair_state(np.inf, 1.0), "a", "b", setting), ("a", "b"))
    return 1.0 - near / far


def fit_vsys(points):
    """Least-squares ``V_sys`` for measured ``(eta, V)`` pairs against ``V_sys * V_ideal``."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if points.shape[0] < 1:
        raise ValueError("no data points")
    eta, v = points[:, 0], points[:, 1]
    if np.any((eta <= 0) | (eta >= 1)):
        raise ValueError("reflectivities must lie in (0, 1)")
    ideal = ideal_hom_visibility(eta)
    denom = float(np.sum(ideal**2))
    if denom == 0.0:
        raise ValueError("degenerate fit: all ideal visibilities vanish")
    return float(np.sum(v * ideal) / denom)
