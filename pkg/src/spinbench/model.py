"""Spin-model problem containers: Ising/QUBO and cubic HUBO instances.

Energies follow the convention

    E(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i            (quadratic)
    E(s) = sum_{(m,n)} J_mn s_m s_n + sum_{(p,q,r)} K_pqr s_p s_q s_r   (cubic)

over spins s_i in {-1, +1}.  Coefficients are stored sparsely, keyed by
sorted index tuples; dense exports are available for solvers that want
them.  Instances are treated as immutable after construction and are safe
to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

BRUTE_FORCE_CAP = 24
INSTANCE_FORMAT_VERSION = 1


def _canonical_pair(key) -> tuple[int, int]:
    i, j = (int(k) for k in key)
    if i == j:
        raise ValueError(f"self-coupling ({i},{j}) not allowed")
    return (i, j) if i < j else (j, i)


def _canonical_triple(key) -> tuple[int, int, int]:
    p, q, r = sorted(int(k) for k in key)
    if p == q or q == r:
        raise ValueError(f"repeated index in triple {tuple(key)}")
    return (p, q, r)


def _check_range(indices, n: int) -> None:
    for i in indices:
        if not 0 <= i < n:
            raise ValueError(f"index {i} out of range for n={n}")


def _canonicalize(terms, n, canon):
    out: dict = {}
    for key, value in terms.items():
        ck = canon(key)
        _check_range(ck, n)
        if ck in out:
            raise ValueError(f"duplicate term {ck} after canonicalization")
        out[ck] = float(value)
    return out


@dataclass(frozen=True)
class IsingInstance:
    """Quadratic spin model: pairwise couplings J and local fields h."""

    n: int
    couplings: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        object.__setattr__(
            self, "couplings", _canonicalize(self.couplings, self.n, _canonical_pair)
        )
        flds = {int(i): float(v) for i, v in self.fields.items()}
        _check_range(flds, self.n)
        object.__setattr__(self, "fields", flds)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric coupling matrix (zero diagonal) and field vector."""
        J = np.zeros((self.n, self.n))
        for (i, j), v in self.couplings.items():
            J[i, j] = J[j, i] = v
        h = np.zeros(self.n)
        for i, v in self.fields.items():
            h[i] = v
        return J, h


@dataclass(frozen=True)
class HuboInstance:
    """Cubic spin model: two-body terms J_mn and three-body terms K_pqr."""

    n: int
    pair_terms: dict = field(default_factory=dict)
    triple_terms: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        object.__setattr__(
            self, "pair_terms", _canonicalize(self.pair_terms, self.n, _canonical_pair)
        )
        object.__setattr__(
            self,
            "triple_terms",
            _canonicalize(self.triple_terms, self.n, _canonical_triple),
        )


def as_state(n: int, values) -> np.ndarray:
    """Validate a spin configuration: length n, entries exactly +-1."""
    s = np.asarray(values, dtype=np.float64)
    if s.shape != (n,):
        raise ValueError(f"state has shape {s.shape}, expected ({n},)")
    if not np.all(np.abs(s) == 1.0):
        raise ValueError("state entries must be exactly -1 or +1")
    return s


def ising_energy(inst: IsingInstance, state) -> float:
    s = as_state(inst.n, state)
    e = 0.0
    for (i, j), v in inst.couplings.items():
        e += v * s[i] * s[j]
    for i, v in inst.fields.items():
        e += v * s[i]
    return float(e)


def hubo_energy(inst: HuboInstance, state) -> float:
    s = as_state(inst.n, state)
    e = 0.0
    for (i, j), v in inst.pair_terms.items():
        e += v * s[i] * s[j]
    for (p, q, r), v in inst.triple_terms.items():
        e += v * s[p] * s[q] * s[r]
    return float(e)


def batch_energies(inst, states: np.ndarray) -> np.ndarray:
    """Energies for a (m, n) batch of spin rows, either instance kind."""
    S = np.asarray(states, dtype=np.float64)
    if S.ndim != 2 or S.shape[1] != inst.n:
        raise ValueError(f"batch has shape {S.shape}, expected (m, {inst.n})")
    e = np.zeros(S.shape[0])
    if isinstance(inst, IsingInstance):
        for (i, j), v in inst.couplings.items():
            e += v * S[:, i] * S[:, j]
        for i, v in inst.fields.items():
            e += v * S[:, i]
    else:
        for (i, j), v in inst.pair_terms.items():
            e += v * S[:, i] * S[:, j]
        for (p, q, r), v in inst.triple_terms.items():
            e += v * S[:, p] * S[:, q] * S[:, r]
    return e


@dataclass(frozen=True)
class ReducedQubo:
    """Quadratic form of a cubic instance, one auxiliary spin per triple.

    Auxiliary spins occupy indices n_original..n_original+len(triples)-1 in
    the order of ``source_triples``.  The constant ``offset`` is excluded
    from the quadratic energy; add it back when comparing against the cubic
    energy (min over auxiliary spins of quadratic energy + offset equals the
    cubic energy of the original block, pointwise).
    """

    ising: IsingInstance
    source_triples: tuple
    offset: float
    n_original: int

    def project(self, state) -> np.ndarray:
        """Original-variable block of a reduced-space state."""
        return np.asarray(state)[: self.n_original]


def reduce_hubo_to_qubo(inst: HuboInstance) -> ReducedQubo:
    """Rewrite each cubic term with one extra spin so only pair terms remain.

    A term K s_p s_q s_r becomes, with sgn = sign(K) and a the new spin,

        |K| * [ 3 + sgn*(s_p+s_q+s_r) + 2*sgn*a
                + 2*a*(s_p+s_q+s_r) + s_p s_q + s_p s_r + s_q s_r ]

    whose minimum over a in {-1,+1} equals K s_p s_q s_r plus the constant
    3|K| for every assignment of (s_p, s_q, s_r).
    """
    couplings: dict = {}
    fields: dict = {}

    def add_pair(i, j, v):
        key = (i, j) if i < j else (j, i)
        couplings[key] = couplings.get(key, 0.0) + v

    for key, v in inst.pair_terms.items():
        add_pair(*key, v)

    triples = tuple(sorted(inst.triple_terms))
    offset = 0.0
    for t_idx, (p, q, r) in enumerate(triples):
        k = inst.triple_terms[(p, q, r)]
        aux = inst.n + t_idx
        mag = abs(k)
        offset += 3.0 * mag
        for i in (p, q, r):
            fields[i] = fields.get(i, 0.0) + k
            add_pair(aux, i, 2.0 * mag)
        fields[aux] = fields.get(aux, 0.0) + 2.0 * k
        add_pair(p, q, mag)
        add_pair(p, r, mag)
        add_pair(q, r, mag)

    ising = IsingInstance(
        n=inst.n + len(triples), couplings=couplings, fields=fields
    )
    return ReducedQubo(
        ising=ising, source_triples=triples, offset=offset, n_original=inst.n
    )


def _chunk_states(n: int, start: int, stop: int) -> np.ndarray:
    """Spin rows for enumeration indices [start, stop).

    Index bit n-1-i carries spin i (bit 0 -> +1, bit 1 -> -1), so increasing
    index order is lexicographic order on the spin tuple with +1 first.
    """
    idx = np.arange(start, stop, dtype=np.uint64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    bits = (idx[:, None] >> shifts[None, :]) & np.uint64(1)
    return 1.0 - 2.0 * bits.astype(np.float64)


def brute_force_ground_state(inst, cap: int = BRUTE_FORCE_CAP):
    """Exact minimum by exhaustive enumeration; ties break to the
    lexicographically smallest state (+1 ordered before -1).
    Only for n <= cap."""
    n = inst.n
    if n > cap:
        raise ValueError(f"n={n} exceeds brute-force cap {cap}")
    best_e = np.inf
    best_state = None
    chunk = 1 << 20
    for start in range(0, 1 << n, chunk):
        stop = min(start + chunk, 1 << n)
        states = _chunk_states(n, start, stop)
        energies = batch_energies(inst, states)
        k = int(np.argmin(energies))
        if energies[k] < best_e:
            best_e = float(energies[k])
            best_state = states[k].copy()
    return best_state, best_e


# ---------------------------------------------------------------------------
# Instance files: JSON with sorted term lists.  Floats round-trip exactly
# because json uses the shortest exact decimal representation.

def instance_to_dict(inst) -> dict:
    if isinstance(inst, IsingInstance):
        return {
            "format_version": INSTANCE_FORMAT_VERSION,
            "kind": "ising",
            "n": inst.n,
            "pair_terms": [[i, j, v] for (i, j), v in sorted(inst.couplings.items())],
            "triple_terms": [],
            "linear_terms": [[i, v] for i, v in sorted(inst.fields.items())],
            "metadata": {},
        }
    return {
        "format_version": INSTANCE_FORMAT_VERSION,
        "kind": "hubo",
        "n": inst.n,
        "pair_terms": [[i, j, v] for (i, j), v in sorted(inst.pair_terms.items())],
        "triple_terms": [
            [p, q, r, v] for (p, q, r), v in sorted(inst.triple_terms.items())
        ],
        "linear_terms": [],
        "metadata": dict(inst.metadata),
    }


def instance_from_dict(data: dict):
    kind = data["kind"]
    n = int(data["n"])
    pairs = {(int(i), int(j)): float(v) for i, j, v in data.get("pair_terms", [])}
    if kind == "ising":
        fields = {int(i): float(v) for i, v in data.get("linear_terms", [])}
        return IsingInstance(n=n, couplings=pairs, fields=fields)
    if kind == "hubo":
        triples = {
            (int(p), int(q), int(r)): float(v)
            for p, q, r, v in data.get("triple_terms", [])
        }
        return HuboInstance(
            n=n,
            pair_terms=pairs,
            triple_terms=triples,
            metadata=data.get("metadata", {}),
        )
    raise ValueError(f"unknown instance kind {kind!r}")


def dumps_instance(inst) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True, indent=1) + "\n"


def loads_instance(text: str):
    return instance_from_dict(json.loads(text))


def save_instance(inst, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(inst))


def load_instance(path):
    with open(path) as fh:
        return loads_instance(fh.read())
