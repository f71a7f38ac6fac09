"""Exact multi-particle pure-state simulation organized as entangled clusters.

Every group of mutually entangled particles is one Cluster holding a dense
complex amplitude vector.  Independent pairs stay in separate clusters and are
merged lazily, only when a Bell measurement spans two of them, so the state
space never blows up to 4^n.  An optional trailing tensor factor of dimension
up to 4 carries an eavesdropper ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .errors import InvalidParticleSet, InvalidState, ParticleNotFound

NORM_TOL = 1e-9
PROB_FLOOR = 1e-12

SQRT_HALF = 1.0 / np.sqrt(2.0)

# Deterministic generator: one per simulation session, PCG64 under the hood.
Rng = np.random.Generator


def make_rng(seed: int) -> Rng:
    """Generator for a session; same seed gives a bit-identical trace."""
    return np.random.default_rng(np.random.SeedSequence(seed))


def spawn_rng(seed: int, *path: int) -> Rng:
    """Independent sub-generator derived from (master seed, trial path).

    Trials seeded this way are order-independent, so experiment results do not
    depend on execution order.
    """
    return np.random.default_rng(np.random.SeedSequence((seed, *path)))


class BellIndex(IntEnum):
    """The four Bell states; the integer value is also the 2-bit key code."""

    PHI_PLUS = 0b00   # (|00> + |11>)/sqrt(2)
    PHI_MINUS = 0b01  # (|00> - |11>)/sqrt(2)
    PSI_PLUS = 0b10   # (|01> + |10>)/sqrt(2)
    PSI_MINUS = 0b11  # (|01> - |10>)/sqrt(2)

    @property
    def code(self) -> str:
        """2-bit key encoding: 00, 01, 10, 11 in enum order."""
        return format(int(self), "02b")

    @classmethod
    def from_code(cls, code: str) -> "BellIndex":
        if len(code) != 2 or any(c not in "01" for c in code):
            raise ValueError(f"not a 2-bit code: {code!r}")
        return cls(int(code, 2))

    @property
    def label(self) -> str:
        return _BELL_LABELS[self]


_BELL_LABELS = {
    BellIndex.PHI_PLUS: "phi+",
    BellIndex.PHI_MINUS: "phi-",
    BellIndex.PSI_PLUS: "psi+",
    BellIndex.PSI_MINUS: "psi-",
}

# Rows in BellIndex order, columns over |00>, |01>, |10>, |11>.  All entries
# are real, so projections need no conjugation.
BELL_MATRIX = np.array(
    [
        [1.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, -1.0],
        [0.0, 1.0, 1.0, 0.0],
        [0.0, 1.0, -1.0, 0.0],
    ]
) * SQRT_HALF
BELL_MATRIX.flags.writeable = False

_BELL_STATES = BELL_MATRIX.astype(complex)
_BELL_STATES.flags.writeable = False


class Owner(str, Enum):
    """Protocol role holding a particle (a role may be played by Eve)."""

    ALICE = "alice"
    BOB = "bob"
    EVE = "eve"


@dataclass(frozen=True)
class ParticleId:
    """Names one live particle as (position in the prepared sequence, holder)."""

    seq: int
    owner: Owner

    def __repr__(self) -> str:
        return f"{self.owner.value}:{self.seq}"


@dataclass(frozen=True)
class Cluster:
    """A maximal set of mutually entangled particles and their joint state.

    ``amplitudes`` is indexed by the computational basis in particle-list
    order, with the ancilla (if any) as the trailing tensor factor, so its
    length is ``2**len(particles) * ancilla_dim``.
    """

    particles: tuple[ParticleId, ...]
    amplitudes: np.ndarray
    ancilla_dim: int = 1

    def __post_init__(self) -> None:
        if len(set(self.particles)) != len(self.particles):
            raise InvalidParticleSet(f"duplicate particles in {self.particles}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if self.ancilla_dim < 1:
            raise InvalidState(f"ancilla_dim must be >= 1, got {self.ancilla_dim}")
        expected = (2 ** len(self.particles)) * self.ancilla_dim
        if amps.shape != (expected,):
            raise InvalidState(
                f"amplitude vector has shape {amps.shape}, expected ({expected},)"
            )
        norm_sq = np.vdot(amps, amps).real
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise InvalidState(f"cluster norm^2 is {norm_sq}, not 1")

    def index_of(self, p: ParticleId) -> int:
        try:
            return self.particles.index(p)
        except ValueError:
            raise ParticleNotFound(f"{p!r} not in cluster {self.particles}") from None

    def __contains__(self, p: ParticleId) -> bool:
        return p in self.particles


@dataclass(frozen=True)
class TripartiteState:
    """Pure state of one transmitted pair plus an eavesdropper ancilla.

    Amplitudes are indexed row-major over (A qubit) x (B qubit) x (ancilla of
    dimension ``ancilla_dim``), i.e. index = (2a + b) * ancilla_dim + e.
    """

    amplitudes: np.ndarray
    ancilla_dim: int = 1

    def __post_init__(self) -> None:
        if not 1 <= self.ancilla_dim <= 4:
            raise InvalidState(f"ancilla_dim must be in 1..4, got {self.ancilla_dim}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (4 * self.ancilla_dim,):
            raise InvalidState(
                f"need {4 * self.ancilla_dim} amplitudes, got shape {amps.shape}"
            )
        norm_sq = np.vdot(amps, amps).real
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise InvalidState(f"state norm^2 is {norm_sq}, not 1")

    def as_matrix(self) -> np.ndarray:
        """4 x ancilla_dim coefficient matrix across the (pair | ancilla) cut."""
        return self.amplitudes.reshape(4, self.ancilla_dim)

    def amplitude_pairs(self) -> list[list[float]]:
        """[[re, im], ...] form used by config files and reports."""
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_amplitude_pairs(
        cls, pairs: list[list[float]], ancilla_dim: int
    ) -> "TripartiteState":
        amps = np.array([complex(re, im) for re, im in pairs])
        return cls(amps, ancilla_dim)

    @classmethod
    def bell_product(
        cls, bell: BellIndex, ancilla: np.ndarray | None = None, ancilla_dim: int = 1
    ) -> "TripartiteState":
        """Bell state on the pair, unentangled with a given ancilla vector."""
        if ancilla is None:
            anc = np.zeros(ancilla_dim, dtype=complex)
            anc[0] = 1.0
        else:
            anc = np.asarray(ancilla, dtype=complex)
            anc = anc / np.linalg.norm(anc)
            ancilla_dim = len(anc)
        amps = np.kron(_BELL_STATES[bell], anc)
        return cls(amps, ancilla_dim)

    @classmethod
    def haar_random(cls, ancilla_dim: int, rng: Rng) -> "TripartiteState":
        """Haar-uniform pure state on the 4*ancilla_dim dimensional space."""
        n = 4 * ancilla_dim
        vec = rng.normal(size=n) + 1j * rng.normal(size=n)
        return cls(vec / np.linalg.norm(vec), ancilla_dim)


def new_epr_pair(id_a: ParticleId, id_b: ParticleId) -> Cluster:
    """Fresh two-particle cluster in (|00> + |11>)/sqrt(2), no ancilla."""
    if id_a == id_b:
        raise InvalidParticleSet(f"EPR pair needs two distinct particles, got {id_a!r}")
    return Cluster((id_a, id_b), _BELL_STATES[BellIndex.PHI_PLUS], 1)


def merge(c1: Cluster, c2: Cluster) -> Cluster:
    """Tensor product of two disjoint clusters.

    Particle order is c1's list followed by c2's; the ancilla factors combine
    into one trailing factor of dimension ``c1.ancilla_dim * c2.ancilla_dim``.
    """
    if set(c1.particles) & set(c2.particles):
        raise InvalidParticleSet(
            f"clusters overlap on {set(c1.particles) & set(c2.particles)}"
        )
    if c1.ancilla_dim == 1 and c2.ancilla_dim == 1:
        joint = np.outer(c1.amplitudes, c2.amplitudes).ravel()
    else:
        a = c1.amplitudes.reshape(-1, c1.ancilla_dim)
        b = c2.amplitudes.reshape(-1, c2.ancilla_dim)
        joint = np.einsum("ia,jb->ijab", a, b).reshape(-1)
    return Cluster(
        c1.particles + c2.particles, joint, c1.ancilla_dim * c2.ancilla_dim
    )


def _bell_branches(c: Cluster, p: ParticleId, q: ParticleId):
    """Unnormalized post-measurement branches for a Bell measurement on (p, q).

    Returns (branches, probs): branches[i] is the residual vector (remaining
    particles in original order, then ancilla) if outcome i occurs, and
    probs[i] its Born probability.
    """
    ip, iq = c.index_of(p), c.index_of(q)
    if ip == iq:
        raise InvalidParticleSet(f"cannot measure {p!r} against itself")
    k = len(c.particles)
    psi = c.amplitudes.reshape([2] * k + [c.ancilla_dim])
    psi = np.moveaxis(psi, (ip, iq), (0, 1)).reshape(4, -1)
    branches = BELL_MATRIX @ psi
    probs = np.einsum("ij,ij->i", branches, branches.conj()).real
    np.clip(probs, 0.0, None, out=probs)
    return branches, probs


def _residual_particles(c: Cluster, ip: int, iq: int) -> tuple[ParticleId, ...]:
    return tuple(pid for i, pid in enumerate(c.particles) if i not in (ip, iq))


def outcome_distribution(
    c: Cluster, p: ParticleId, q: ParticleId
) -> dict[BellIndex, float]:
    """Exact Born distribution of a Bell measurement on (p, q).

    Probabilities below PROB_FLOOR are reported as exactly zero.
    """
    _, probs = _bell_branches(c, p, q)
    return {
        BellIndex(i): (float(probs[i]) if probs[i] >= PROB_FLOOR else 0.0)
        for i in range(4)
    }


def project_bell(
    c: Cluster, p: ParticleId, q: ParticleId, outcome: BellIndex
) -> tuple[float, Cluster | None]:
    """Probability of a fixed Bell outcome on (p, q) and the collapsed residual.

    The residual covers the remaining particles and ancilla; it is ``None``
    when the outcome has (numerically) zero probability or nothing remains.
    """
    branches, probs = _bell_branches(c, p, q)
    prob = float(probs[outcome])
    if prob < PROB_FLOOR:
        return prob, None
    residual = _make_residual(c, p, q, branches[outcome], prob)
    return prob, residual


def _make_residual(c, p, q, branch, prob) -> Cluster | None:
    if len(c.particles) == 2 and c.ancilla_dim == 1:
        return None
    remaining = _residual_particles(c, c.index_of(p), c.index_of(q))
    return Cluster(remaining, branch / np.sqrt(prob), c.ancilla_dim)


def bell_measure(
    c: Cluster, p: ParticleId, q: ParticleId, rng: Rng
) -> tuple[BellIndex, list[Cluster]]:
    """Sample a Bell measurement on (p, q) with Born-rule probabilities.

    Returns the sampled outcome plus the clusters the measurement leaves
    behind: a two-particle cluster holding (p, q) in the observed Bell state,
    and, when particles or ancilla remain, the renormalized residual cluster.
    """
    branches, probs = _bell_branches(c, p, q)
    idx = _sample_index(probs, rng)
    prob = probs[idx]
    if prob < PROB_FLOOR:
        # Cannot happen for a normalized cluster; a zero-probability branch is
        # never selected by the inverse-CDF sampler.
        raise InvalidState("sampled a zero-probability Bell outcome")
    pair = Cluster((p, q), _BELL_STATES[idx], 1)
    parts = [pair]
    residual = _make_residual(c, p, q, branches[idx], prob)
    if residual is not None:
        parts.append(residual)
    return BellIndex(idx), parts


def _sample_index(probs: np.ndarray, rng: Rng) -> int:
    # Inverse CDF in fixed enum order; ties and float tails resolve to the
    # last outcome with nonzero probability.
    u = rng.random()
    acc = 0.0
    last_positive = 0
    for i, pr in enumerate(probs):
        if pr >= PROB_FLOOR:
            last_positive = i
        acc += pr
        if u < acc:
            return i
    return last_positive


def attach_ancilla(c: Cluster, phi: TripartiteState) -> Cluster:
    """Replace a bare pair's state with a pair-plus-ancilla state.

    The cluster must hold exactly two particles and no prior ancilla; the
    first particle takes phi's A slot and the second its B slot.
    """
    if len(c.particles) != 2 or c.ancilla_dim != 1:
        raise InvalidState(
            "ancilla attachment needs a 2-particle cluster without ancilla"
        )
    return Cluster(c.particles, phi.amplitudes, phi.ancilla_dim)
