"""Brute-force density-matrix verification engine.

Everything here recomputes, from explicit small matrices, quantities the rest
of the package obtains from closed forms, so the two routes can be compared:

* purifications of Bell-diagonal (and arbitrary two-qubit) states, with the
  eavesdropper holding the purifying system;
* the classical-classical-quantum state over (U1, U2, W1) and the two
  environment copies produced by measuring two purified copies in the z
  basis and applying the length-2 block reduction;
* von Neumann, min- and max-entropies on dense Hermitian matrices, with the
  generalized eigenvalue problem solved by congruence on the support;
* the discrete twirl (correlated Pauli averaging onto Bell-diagonal form);
* the coset decomposition of averaged eavesdropper states over a linear
  code's shifts;
* an entropy-inequality suite (monotonicity, a chain-rule instance, the
  removal bound, the fidelity-distance sandwich) on randomized inputs.

All computations stay at dimension <= 256 and use eigendecompositions of
Hermitian matrices as the single numeric kernel. Entropies are in bits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import BellDiagonal, derived_dists
from .entropy import Dist, shannon_entropy

__all__ = [
    "CcqState",
    "WorstCaseRecord",
    "von_neumann_entropy",
    "max_entropy",
    "min_entropy",
    "fidelity",
    "trace_norm",
    "partial_trace",
    "purify_bell_diagonal",
    "purify_state",
    "bell_basis_vector",
    "bell_diagonal_entries",
    "assemble_two_copy_ccq",
    "conditional_entropy",
    "theorem3_direct",
    "discrete_twirl",
    "worst_case_check",
    "coset_decomposition_check",
    "theta_vector",
    "lemma_suite",
    "random_bell_diagonal",
    "random_density",
]

_TOL = 1e-10
_MAX_DIM = 256

QUANTUM = "quantum"


def _as_matrix(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if rho.shape[0] > _MAX_DIM:
        raise ValueError(f"dimension {rho.shape[0]} exceeds {_MAX_DIM}")
    return rho


def check_density(rho, tol: float = _TOL, trace_one: bool = True) -> np.ndarray:
    """Validate Hermiticity, positivity, and (optionally) unit trace."""
    rho = _as_matrix(rho)
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    eigs = np.linalg.eigvalsh(rho)
    if eigs.min() < -tol:
        raise ValueError(f"matrix has negative eigenvalue {eigs.min()}")
    if trace_one and abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError(f"trace {np.trace(rho).real}, expected 1")
    return rho


def von_neumann_entropy(rho) -> float:
    """-sum lambda log2 lambda over the eigenvalues; zeros contribute 0."""
    rho = _as_matrix(rho)
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if eigs.min() < -_TOL:
        raise ValueError(f"state has negative eigenvalue {eigs.min()}")
    eigs = eigs[eigs > 0.0]
    return float(-np.sum(eigs * np.log2(eigs))) if eigs.size else 0.0


def max_entropy(rho, tol: float = _TOL) -> float:
    """log2 of the rank (eigenvalues above tol)."""
    rho = _as_matrix(rho)
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    rank = int(np.count_nonzero(eigs > tol))
    if rank == 0:
        raise ValueError("zero operator has no rank")
    return math.log2(rank)


def _support(rho, tol: float = _TOL):
    """(eigenvalues, isometry onto the support)."""
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    keep = w > tol
    return w[keep], v[:, keep]


def min_entropy(rho_ab, sigma_b, dims: tuple[int, int], tol: float = _TOL) -> float:
    """-log2 of the least lambda with lambda*(id_A (x) sigma_B) >= rho_AB.

    Solved as the top eigenvalue of the congruence-transformed operator on
    the support of sigma_B. Returns -inf when rho's B-marginal leaks outside
    that support (the defining infimum is then empty).
    """
    rho_ab = _as_matrix(rho_ab)
    sigma_b = _as_matrix(sigma_b)
    da, db = dims
    if rho_ab.shape[0] != da * db or sigma_b.shape[0] != db:
        raise ValueError("dimension mismatch between state and conditioning system")
    ws, vs = _support(sigma_b, tol)
    if ws.size == 0:
        return float("-inf")
    rho_b = partial_trace(rho_ab, (da, db), (1,))
    leak = np.trace(rho_b).real - np.trace(vs.conj().T @ rho_b @ vs).real
    if leak > tol:
        return float("-inf")
    iso = np.kron(np.eye(da), vs)
    core = iso.conj().T @ rho_ab @ iso
    scale = np.kron(np.eye(da), np.diag(ws**-0.5))
    lam = float(np.linalg.eigvalsh(scale @ core @ scale).max())
    if lam <= 0.0:
        return float("inf")
    return -math.log2(lam)


def fidelity(rho, sigma) -> float:
    """Tr sqrt(sqrt(rho) sigma sqrt(rho)), via the eigenvalues of rho*sigma
    (same spectrum, no explicit square roots). Valid for subnormalized
    operators as well."""
    rho = _as_matrix(rho)
    sigma = _as_matrix(sigma)
    eigs = np.linalg.eigvals(rho @ sigma)
    return float(np.sum(np.sqrt(np.clip(eigs.real, 0.0, None))))


def trace_norm(op) -> float:
    """Sum of absolute eigenvalues (Hermitian input)."""
    op = _as_matrix(op)
    return float(np.abs(np.linalg.eigvalsh((op + op.conj().T) / 2.0)).sum())


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in keep (0-based, ascending)."""
    rho = _as_matrix(rho)
    dims = tuple(int(d) for d in dims)
    keep = sorted(set(keep))
    k = len(dims)
    if rho.shape[0] != math.prod(dims):
        raise ValueError("dims do not factor the matrix dimension")
    if any(i < 0 or i >= k for i in keep):
        raise ValueError("keep index out of range")
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[i] for i in range(k)]
    col = [letters[k + i] if i in keep else letters[i] for i in range(k)]
    out = [letters[i] for i in keep] + [letters[k + i] for i in keep]
    expr = "".join(row + col) + "->" + "".join(out)
    d_keep = math.prod(dims[i] for i in keep) if keep else 1
    return np.einsum(expr, rho.reshape(dims + dims)).reshape(d_keep, d_keep)


# --- purifications and the measured two-copy construction ---


def bell_basis_vector(x: int, z: int) -> np.ndarray:
    """(|0, x> + (-1)^z |1, 1+x>)/sqrt(2) on two qubits."""
    vec = np.zeros(4, dtype=complex)
    vec[2 * 0 + x] = 1.0
    vec[2 * 1 + (1 ^ x)] = -1.0 if z else 1.0
    return vec / math.sqrt(2.0)


def purify_bell_diagonal(p: BellDiagonal) -> np.ndarray:
    """Unit vector on A (x) B (x) E (2*2*4) whose E-trace is the mixture.

    The environment basis label 2x+z records which Bell component it
    purifies."""
    psi = np.zeros(16, dtype=complex)
    for x, z in itertools.product((0, 1), repeat=2):
        weight = (p.p00, p.p10, p.p01, p.p11)[x + 2 * z]
        if weight <= 0.0:
            continue
        psi += math.sqrt(weight) * np.kron(bell_basis_vector(x, z), _unit(4, 2 * x + z))
    return psi


def _unit(dim: int, idx: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[idx] = 1.0
    return vec


def purify_state(rho, tol: float = _TOL) -> np.ndarray:
    """Eigen-purification: sum_i sqrt(lambda_i) |v_i>|i>, environment = rank."""
    rho = check_density(rho, tol)
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    keep = w > tol
    w, v = w[keep], v[:, keep]
    d, r = rho.shape[0], int(keep.sum())
    psi = np.zeros(d * r, dtype=complex)
    for i in range(r):
        psi += math.sqrt(w[i]) * np.kron(v[:, i], _unit(r, i))
    return psi


def bell_diagonal_entries(sigma) -> tuple[float, float, float, float]:
    """Diagonal of sigma in the Bell basis, ordered (p00, p10, p01, p11)."""
    sigma = _as_matrix(sigma)
    vals = []
    for x, z in ((0, 0), (1, 0), (0, 1), (1, 1)):
        b = bell_basis_vector(x, z)
        vals.append(float((b.conj() @ sigma @ b).real))
    return tuple(vals)


@dataclass(frozen=True)
class CcqState:
    """Classical registers plus one quantum system, block by block.

    blocks maps a tuple of register values to (probability, conditional
    density matrix); zero-probability blocks carry None. The joint state is
    block-diagonal, so every entropy reduces to per-block spectra.
    """

    registers: tuple[str, ...]
    alphabet: tuple[int, ...]
    blocks: dict
    quantum_dim: int

    def __post_init__(self):
        if len(self.registers) != len(self.alphabet):
            raise ValueError("one alphabet size per register required")
        total = math.prod(self.alphabet) * self.quantum_dim
        if total > _MAX_DIM:
            raise ValueError(f"total dimension {total} exceeds {_MAX_DIM}")
        mass = math.fsum(prob for prob, _ in self.blocks.values())
        if abs(mass - 1.0) > 1e-9:
            raise ValueError(f"block probabilities sum to {mass}")


def _two_copy_ccq_from_pure(psi: np.ndarray) -> CcqState:
    """Measure two copies of a tripartite pure state in the z basis on A,B
    and label the outcomes with the block-reduction variables.

    psi has shape (2, 2, dE); outcome (a, b) leaves the environment in the
    subnormalized vector psi[a, b]. For outcomes (a1,b1), (a2,b2):
    u1 = a1+a2, w1 = (a1+b1)+(a2+b2), and u2 = a2 where w1 = 0, else 0.
    """
    if psi.ndim != 3 or psi.shape[:2] != (2, 2):
        raise ValueError(f"expected shape (2, 2, dE), got {psi.shape}")
    d_e = psi.shape[2]
    accum: dict[tuple[int, int, int], np.ndarray] = {}
    for a1, b1, a2, b2 in itertools.product((0, 1), repeat=4):
        vec = np.kron(psi[a1, b1], psi[a2, b2])
        weight = float(np.vdot(vec, vec).real)
        if weight <= 1e-300:
            continue
        w1 = (a1 ^ b1) ^ (a2 ^ b2)
        u1 = a1 ^ a2
        u2 = a2 if w1 == 0 else 0
        key = (u1, u2, w1)
        accum.setdefault(key, np.zeros((d_e * d_e, d_e * d_e), dtype=complex))
        accum[key] += np.outer(vec, vec.conj())
    blocks = {}
    for key, op in accum.items():
        prob = float(np.trace(op).real)
        blocks[key] = (prob, op / prob)
    return CcqState(
        registers=("u1", "u2", "w1"),
        alphabet=(2, 2, 2),
        blocks=blocks,
        quantum_dim=d_e * d_e,
    )


def assemble_two_copy_ccq(p: BellDiagonal) -> CcqState:
    """The (U1, U2, W1, E1 E2) state for two purified copies of p."""
    return _two_copy_ccq_from_pure(purify_bell_diagonal(p).reshape(2, 2, 4))


def conditional_entropy(ccq: CcqState, conditioned_on) -> float:
    """H(everything else | conditioned_on) = H(joint) - H(conditioned_on).

    conditioned_on is a collection of register names, optionally including
    "quantum" for the quantum part. Empty means the joint entropy.
    """
    names = set(conditioned_on)
    with_quantum = QUANTUM in names
    names.discard(QUANTUM)
    unknown = names - set(ccq.registers)
    if unknown:
        raise ValueError(f"unknown registers {sorted(unknown)}")
    joint = _ccq_entropy(ccq, set(ccq.registers), True)
    if not names and not with_quantum:
        return joint
    return joint - _ccq_entropy(ccq, names, with_quantum)


def _ccq_entropy(ccq: CcqState, names: set, with_quantum: bool) -> float:
    """Entropy of the marginal on the named registers (plus the quantum
    part when requested), exploiting block-diagonal structure."""
    idx = [i for i, r in enumerate(ccq.registers) if r in names]
    groups: dict[tuple, list] = {}
    for key, (prob, op) in ccq.blocks.items():
        if prob <= 0.0:
            continue
        groups.setdefault(tuple(key[i] for i in idx), []).append((prob, op))
    probs = [math.fsum(p for p, _ in members) for members in groups.values()]
    h_classical = shannon_entropy(Dist(probs)) if probs else 0.0
    if not with_quantum:
        return h_classical
    h_quantum = 0.0
    for members, p_g in zip(groups.values(), probs):
        mix = sum(p * op for p, op in members) / p_g
        h_quantum += p_g * von_neumann_entropy(mix)
    return h_classical + h_quantum


def theorem3_direct(p: BellDiagonal) -> tuple[float, float]:
    """Both bracket arguments of the closed-form rate, from raw entropies.

    first  = (1/2)[H(U1 U2 | W1 E1 E2) - H(P_W1) - P_W1(0) H(P_W2|W1=0)]
    second = (1/2)[H(U2 | W1 U1 E1 E2) - P_W1(0) H(P_W2|W1=0)]
    """
    ccq = assemble_two_copy_ccq(p)
    d = derived_dists(p)
    h_w1 = shannon_entropy(d.w1_dist)
    h_w2 = shannon_entropy(d.w2_given_w1_0)
    p_w1_0 = d.w1_dist(0)
    h_uu_we = conditional_entropy(ccq, ("w1", QUANTUM))
    h_u2_uwe = conditional_entropy(ccq, ("u1", "w1", QUANTUM))
    first = 0.5 * (h_uu_we - h_w1 - p_w1_0 * h_w2)
    second = 0.5 * (h_u2_uwe - p_w1_0 * h_w2)
    return first, second


# --- discrete twirl and the worst-case comparison ---

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def discrete_twirl(sigma) -> np.ndarray:
    """Average over correlated X^s Z^t on both qubits; output Bell-diagonal."""
    sigma = _as_matrix(sigma)
    if sigma.shape[0] != 4:
        raise ValueError("discrete twirl acts on two-qubit states")
    out = np.zeros_like(sigma)
    for s, t in itertools.product((0, 1), repeat=2):
        pauli = np.linalg.matrix_power(_PAULI_X, s) @ np.linalg.matrix_power(_PAULI_Z, t)
        u = np.kron(pauli, pauli)
        out += u @ sigma @ u.conj().T
    return out / 4.0


def _measured_block_laws(psi: np.ndarray) -> tuple[Dist, Dist]:
    """(P_W1, P_W2 | W1=0) for two i.i.d. copies measured in the z basis."""
    weights = np.einsum("abe,abe->ab", psi, psi.conj()).real
    p_e = np.array([weights[0, 0] + weights[1, 1], weights[0, 1] + weights[1, 0]])
    p_e = p_e / p_e.sum()
    w1 = Dist([p_e[0] ** 2 + p_e[1] ** 2, 2.0 * p_e[0] * p_e[1]])
    if w1(0) > 0.0:
        w2 = Dist([p_e[0] ** 2 / w1(0), p_e[1] ** 2 / w1(0)])
    else:
        w2 = Dist([1.0, 0.0])
    return w1, w2


def _theorem1_brackets(sigma) -> tuple[float, float, Dist, Dist]:
    psi = purify_state(sigma).reshape(2, 2, -1)
    ccq = _two_copy_ccq_from_pure(psi)
    w1, w2 = _measured_block_laws(psi)
    h_w1 = shannon_entropy(w1)
    h_w2 = shannon_entropy(w2)
    first = conditional_entropy(ccq, ("w1", QUANTUM)) - h_w1 - w1(0) * h_w2
    second = conditional_entropy(ccq, ("u1", "w1", QUANTUM)) - w1(0) * h_w2
    return first, second, w1, w2


@dataclass(frozen=True)
class WorstCaseRecord:
    """Bracket quantities for a state and its twirl, plus the block laws."""

    first_original: float
    second_original: float
    first_twirled: float
    second_twirled: float
    w1_original: Dist
    w1_twirled: Dist
    w2_original: Dist
    w2_twirled: Dist

    @property
    def twirl_not_better(self) -> bool:
        return (
            self.first_twirled <= self.first_original + 1e-9
            and self.second_twirled <= self.second_original + 1e-9
        )

    @property
    def laws_invariant(self) -> bool:
        dev = max(
            abs(self.w1_original(0) - self.w1_twirled(0)),
            abs(self.w2_original(0) - self.w2_twirled(0)),
        )
        return dev <= 1e-12


def worst_case_check(sigma) -> WorstCaseRecord:
    """Compare both bracket quantities for sigma against its discrete twirl."""
    sigma = check_density(sigma)
    f_o, s_o, w1_o, w2_o = _theorem1_brackets(sigma)
    f_t, s_t, w1_t, w2_t = _theorem1_brackets(discrete_twirl(sigma))
    return WorstCaseRecord(f_o, s_o, f_t, s_t, w1_o, w1_t, w2_o, w2_t)


# --- coset decomposition of averaged eavesdropper states ---


def _pxz_product(p: BellDiagonal, xbar: tuple, z: tuple) -> float:
    entries = {(0, 0): p.p00, (1, 0): p.p10, (0, 1): p.p01, (1, 1): p.p11}
    out = 1.0
    for xi, zi in zip(xbar, z):
        out *= entries[(xi, zi)]
    return out


def _eve_block_vector(p: BellDiagonal, x: tuple, xbar: tuple) -> np.ndarray:
    """Normalized environment state given Alice's bits x and discrepancies
    xbar across a block of copies; per-copy basis label is 2*xbar_i + z_i."""
    m = len(x)
    px = 1.0
    for xi in xbar:
        px *= (p.p00 + p.p01) if xi == 0 else (p.p10 + p.p11)
    if px <= 0.0:
        raise ValueError("conditioning on a zero-probability discrepancy pattern")
    vec = np.zeros(4**m, dtype=complex)
    for z in itertools.product((0, 1), repeat=m):
        w = _pxz_product(p, xbar, z)
        if w <= 0.0:
            continue
        idx = 0
        for xi, zi in zip(xbar, z):
            idx = idx * 4 + (2 * xi + zi)
        sign = (-1) ** (sum(a * b for a, b in zip(x, z)) & 1)
        vec[idx] = sign * math.sqrt(w)
    return vec / math.sqrt(px)


def _dual_code(code: list, m: int) -> list:
    words = [tuple(w) for w in itertools.product((0, 1), repeat=m)]
    return [w for w in words if all(sum(a * b for a, b in zip(w, c)) % 2 == 0 for c in code)]


def _coset_reps(subgroup: list, m: int) -> list:
    seen = set()
    reps = []
    for w in itertools.product((0, 1), repeat=m):
        if w in seen:
            continue
        reps.append(w)
        seen.update(tuple(a ^ b for a, b in zip(w, c)) for c in subgroup)
    return reps


def theta_vector(p: BellDiagonal, shift: tuple, xbar: tuple, j: tuple, dual: list) -> np.ndarray:
    """Eigenvector of the code-averaged environment state for coset j."""
    m = len(shift)
    norm_sq = math.fsum(
        _pxz_product(p, xbar, tuple(ji ^ ci for ji, ci in zip(j, c))) for c in dual
    )
    vec = np.zeros(4**m, dtype=complex)
    if norm_sq <= 0.0:
        return vec
    for c in dual:
        z = tuple(ji ^ ci for ji, ci in zip(j, c))
        w = _pxz_product(p, xbar, z)
        if w <= 0.0:
            continue
        idx = 0
        for xi, zi in zip(xbar, z):
            idx = idx * 4 + (2 * xi + zi)
        sign = (-1) ** (sum(a * b for a, b in zip(shift, c)) & 1)
        vec[idx] = sign * math.sqrt(w)
    return vec / math.sqrt(norm_sq)


def coset_decomposition_check(p: BellDiagonal, code, shift) -> float:
    """Max entrywise deviation between the code-averaged environment state
    and its coset eigendecomposition, over all discrepancy patterns.

    code is a set of length-m words closed under XOR; shift is the common
    offset a. Patterns with zero probability are skipped (both sides are
    conditioned on an impossible event).
    """
    code = [tuple(int(b) for b in w) for w in code]
    shift = tuple(int(b) for b in shift)
    m = len(shift)
    if m > 3:
        raise ValueError("coset check limited to blocks of length <= 3")
    if any(len(w) != m for w in code):
        raise ValueError("code word length mismatch")
    dual = _dual_code(code, m)
    reps = _coset_reps(dual, m)
    worst = 0.0
    for xbar in itertools.product((0, 1), repeat=m):
        px = 1.0
        for xi in xbar:
            px *= (p.p00 + p.p01) if xi == 0 else (p.p10 + p.p11)
        if px <= 1e-14:
            continue
        lhs = np.zeros((4**m, 4**m), dtype=complex)
        for c in code:
            x = tuple(ci ^ ai for ci, ai in zip(c, shift))
            vec = _eve_block_vector(p, x, xbar)
            lhs += np.outer(vec, vec.conj()) / len(code)
        rhs = np.zeros_like(lhs)
        for j in reps:
            weight = math.fsum(
                _pxz_product(p, xbar, tuple(ji ^ ci for ji, ci in zip(j, c))) for c in dual
            ) / px
            if weight <= 0.0:
                continue
            vec = theta_vector(p, shift, xbar, j, dual)
            rhs += weight * np.outer(vec, vec.conj())
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


# --- randomized entropy-inequality suite ---


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Normalized G G^dagger with complex Gaussian G of the given rank."""
    if rank is None:
        rank = dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_bell_diagonal(rng: np.random.Generator) -> BellDiagonal:
    probs = rng.dirichlet(np.ones(4))
    vals = [float(v) for v in probs]
    vals[0] = 1.0 - (vals[1] + vals[2] + vals[3])
    return BellDiagonal(*vals)


def lemma_suite(samples: int, rng: np.random.Generator) -> dict:
    """Max violation per inequality over randomized instances.

    All instances are exact (no smoothing): each reported number should be
    <= 0 up to numerical noise, and the suite's consumers assert <= 1e-9.
    """
    worst = {
        "monotonicity": 0.0,
        "chain_rule": 0.0,
        "removal": 0.0,
        "sandwich_lower": 0.0,
        "sandwich_upper": 0.0,
        "operator_bound": 0.0,
    }
    for _ in range(samples):
        # monotonicity: adding a classical register cannot lower min-entropy
        probs = rng.dirichlet(np.ones(2))
        rho_bc_parts = [random_density(4, rng, rank=int(rng.integers(1, 5))) for _ in range(2)]
        rho_xbc = np.zeros((8, 8), dtype=complex)
        for x in range(2):
            proj = np.zeros((2, 2), dtype=complex)
            proj[x, x] = 1.0
            rho_xbc += probs[x] * np.kron(proj, rho_bc_parts[x])
        rho_bc = probs[0] * rho_bc_parts[0] + probs[1] * rho_bc_parts[1]
        sigma_c = random_density(2, rng)
        lhs = min_entropy(rho_xbc, sigma_c, dims=(4, 2))
        rhs = min_entropy(rho_bc, sigma_c, dims=(2, 2))
        worst["monotonicity"] = max(worst["monotonicity"], rhs - lhs)

        # chain rule witness: conditioning on B's uniformized support loses
        # at most the max-entropy of B
        rho_abc = random_density(8, rng, rank=int(rng.integers(1, 9)))
        sigma_c = random_density(2, rng)
        h_c = min_entropy(rho_abc, sigma_c, dims=(4, 2))
        rho_b = partial_trace(rho_abc, (2, 2, 2), (1,))
        wb, vb = _support(rho_b)
        rank_b = wb.size
        proj_b = vb @ vb.conj().T
        sigma_bc = np.kron(proj_b / rank_b, sigma_c)
        h_bc = min_entropy(rho_abc, sigma_bc, dims=(2, 4))
        worst["chain_rule"] = max(worst["chain_rule"], (h_c - math.log2(rank_b)) - h_bc)

        # removal bound: discarding A costs at most its max-entropy
        rho_abc = random_density(8, rng, rank=int(rng.integers(1, 9)))
        sigma_c = random_density(2, rng)
        lhs = min_entropy(rho_abc, sigma_c, dims=(4, 2))
        rho_bc = partial_trace(rho_abc, (2, 2, 2), (1, 2))
        rho_a = partial_trace(rho_abc, (2, 2, 2), (0,))
        rhs = min_entropy(rho_bc, sigma_c, dims=(2, 2)) - max_entropy(rho_a)
        worst["removal"] = max(worst["removal"], rhs - lhs)

        # fidelity-distance sandwich on subnormalized operators
        rho = random_density(4, rng) * float(rng.uniform(0.5, 1.0))
        sig = random_density(4, rng) * float(rng.uniform(0.5, 1.0))
        f = fidelity(rho, sig)
        tn = trace_norm(rho - sig)
        traces = np.trace(rho).real + np.trace(sig).real
        worst["sandwich_lower"] = max(worst["sandwich_lower"], (traces - 2.0 * f) - tn)
        worst["sandwich_upper"] = max(
            worst["sandwich_upper"], tn - math.sqrt(max(traces**2 - 4.0 * f**2, 0.0))
        )

        # operator inequality behind the removal bound:
        # rank(rho_A) id_A (x) rho_B >= rho_AB
        rho_ab = random_density(4, rng, rank=int(rng.integers(1, 5)))
        rho_a = partial_trace(rho_ab, (2, 2), (0,))
        rho_b = partial_trace(rho_ab, (2, 2), (1,))
        rank_a = int(np.count_nonzero(np.linalg.eigvalsh(rho_a) > _TOL))
        gap = np.linalg.eigvalsh(rank_a * np.kron(np.eye(2), rho_b) - rho_ab).min()
        worst["operator_bound"] = max(worst["operator_bound"], -float(gap))
    return worst
