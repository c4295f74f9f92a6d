"""State-vector check that coalescing and dewetting act as two simple projectors on GHZ states.

Qubit 0 is the most significant bit of an amplitude index. In a simulated
network each hyperedge owns one qubit per member vertex; qubits are ordered
by (edge id, vertex id).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .derivation import DerivationSequence, replay
from .hypergraph import Hypergraph

MAX_QUBITS = 14
TOL = 1e-9


class QuantumError(ValueError):
    pass


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        n = amps.size.bit_length() - 1
        if amps.size != 1 << n:
            raise QuantumError(f"amplitude count {amps.size} is not a power of two")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def kron(self, other: "PureState") -> "PureState":
        return PureState(np.kron(self.amplitudes, other.amplitudes))


def ghz(r: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2) on ``r`` qubits."""
    if not 1 <= r <= MAX_QUBITS:
        raise QuantumError(f"GHZ size must be in 1..{MAX_QUBITS}, got {r}")
    amps = np.zeros(1 << r, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(amps)


def product(states) -> PureState:
    out = PureState(np.ones(1, dtype=complex))
    for s in states:
        out = out.kron(s)
    return out


def _check_qubit(s: PureState, q: int):
    if not 0 <= q < s.n_qubits:
        raise QuantumError(f"qubit {q} out of range for {s.n_qubits} qubits")


def _renormalize(t: np.ndarray) -> tuple[PureState, float]:
    weight = float(np.vdot(t, t).real)
    if weight < TOL * TOL:
        raise QuantumError("projection has zero norm")
    return PureState(t.ravel() / np.sqrt(weight)), weight


def merge_with_weight(s: PureState, q1: int, q2: int) -> tuple[PureState, float]:
    """Apply |0><00| + |1><11| to (q1, q2). The fused qubit sits where q1 was
    once q2 is removed; returns the renormalized state and its squared norm
    before renormalization."""
    _check_qubit(s, q1)
    _check_qubit(s, q2)
    if q1 == q2:
        raise QuantumError("merge needs two distinct qubits")
    t = np.moveaxis(s.tensor(), (q1, q2), (0, 1))
    fused = np.stack([t[0, 0], t[1, 1]])
    pos = q1 if q1 < q2 else q1 - 1
    return _renormalize(np.moveaxis(fused, 0, pos))


def apply_merge_projector(s: PureState, q1: int, q2: int) -> tuple[PureState, float]:
    return merge_with_weight(s, q1, q2)


def disentangle_with_weight(s: PureState, q: int) -> tuple[PureState, float]:
    _check_qubit(s, q)
    t = np.moveaxis(s.tensor(), q, 0)
    return _renormalize(t[0] + t[1])


def apply_disentangle(s: PureState, q: int) -> PureState:
    """Apply |0><0| + |0><1| to qubit ``q`` and drop it."""
    return disentangle_with_weight(s, q)[0]


def apply_local(s: PureState, q: int, u: np.ndarray) -> PureState:
    """Single-qubit unitary on ``q``; lets non-GHZ rank-2 states be prepared."""
    _check_qubit(s, q)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise QuantumError("local operation must be 2x2")
    t = np.moveaxis(np.tensordot(u, np.moveaxis(s.tensor(), q, 0), axes=1), 0, q)
    return PureState(t.ravel())


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        return False
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < tol:
        return bool(np.all(np.abs(a) < tol))
    phase = a[k] / b[k]
    if abs(abs(phase) - 1) > tol:
        return False
    return bool(np.all(np.abs(a - phase * b) <= tol))


def is_ghz_equivalent(s: PureState, r: int, tol: float = TOL) -> bool:
    return s.n_qubits == r and equal_up_to_phase(s.amplitudes, ghz(r).amplitudes, tol)


def expected_network_state(labels: list[tuple[str, str]]) -> np.ndarray:
    """Tensor product of one GHZ state per edge, qubits in ``labels`` order."""
    n = len(labels)
    idx = np.arange(1 << n)
    bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
    by_edge: dict[str, list[int]] = {}
    for k, (e, _) in enumerate(labels):
        by_edge.setdefault(e, []).append(k)
    ok = np.ones(1 << n, dtype=bool)
    for ks in by_edge.values():
        for k in ks[1:]:
            ok &= bits[k] == bits[ks[0]]
    return np.where(ok, (1 / np.sqrt(2)) ** len(by_edge), 0).astype(complex)


@dataclass
class StepRecord:
    op: str
    args: tuple[str, ...]
    weights: list[float]
    factorizes: bool


@dataclass
class Block:
    """Qubits of the initial edges whose lineages get merged together."""

    labels: list[tuple[str, str]]
    state: PureState


@dataclass
class SimulationReport:
    blocks: list[Block]
    initial_ok: bool
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.initial_ok and all(r.factorizes and all(w > 0 for w in r.weights) for r in self.steps)

    @property
    def labels(self) -> list[tuple[str, str]]:
        return [lab for b in self.blocks for lab in b.labels]

    @property
    def n_qubits(self) -> int:
        return sum(b.state.n_qubits for b in self.blocks)

    def table(self) -> str:
        lines = [f"{'step':>4}  {'operation':<32} {'weight':>10}  result"]
        lines.append(f"{0:>4}  {'initial GHZ product':<32} {'':>10}  {'pass' if self.initial_ok else 'FAIL'}")
        for i, r in enumerate(self.steps, 1):
            w = min(r.weights) if r.weights else 1.0
            good = r.factorizes and all(x > 0 for x in r.weights)
            lines.append(f"{i:>4}  {r.op + ' ' + ' '.join(r.args):<32} {w:>10.4g}  {'pass' if good else 'FAIL'}")
        edges = len({e for e, _ in self.labels})
        lines.append(f"final: {self.n_qubits} qubits over {edges} edges in {len(self.blocks)} independent blocks")
        return "\n".join(lines)


def qubit_assignment(g: Hypergraph) -> list[tuple[str, str]]:
    return sorted((e, v) for e, members in g.edges.items() for v in members)


def _lineage_blocks(start: Hypergraph, seq: DerivationSequence) -> list[list[str]]:
    root = {e: e for e in start.edges}
    current = {e: e for e in start.edges}

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for step in seq.steps:
        if step.op == "coalesce":
            e1, e2, new_id = step.args
            a, b = find(current.pop(e1)), find(current.pop(e2))
            root[b] = a
            current[new_id] = a
    groups: dict[str, list[str]] = {}
    for e in start.edge_ids:
        groups.setdefault(find(e), []).append(e)
    return sorted(groups.values())


def simulate_derivation(g: Hypergraph, seq: DerivationSequence) -> SimulationReport:
    """Replay ``seq`` on one GHZ state per edge and check each intermediate state.

    A coalesce merges the two qubits of every shared vertex; a dewet
    disentangles the edge's qubit at that vertex. Edges whose lineages never
    meet stay in a product state, so each such block is simulated on its own
    and the qubit limit applies per block.
    """
    states = replay(g, seq)  # validates step preconditions
    start = states[0]
    blocks = []
    where: dict[str, int] = {}
    for i, group in enumerate(_lineage_blocks(start, seq)):
        sub = start.subgraph(group)
        labels = qubit_assignment(sub)
        if len(labels) > MAX_QUBITS:
            raise QuantumError(f"a block of {len(labels)} qubits exceeds the limit of {MAX_QUBITS}")
        blocks.append(Block(labels, product(ghz(len(sub.edges[e])) for e in sub.edge_ids)))
        where.update((e, i) for e in group)
    initial_ok = all(equal_up_to_phase(b.state.amplitudes, expected_network_state(b.labels)) for b in blocks)
    report = SimulationReport(blocks, initial_ok)
    for step, before in zip(seq.steps, states):
        weights = []
        block = blocks[where[step.args[0]]]
        labels, psi = block.labels, block.state
        if step.op == "coalesce":
            e1, e2, new_id = step.args
            for v in sorted(before.edges[e1] & before.edges[e2]):
                q1, q2 = labels.index((e1, v)), labels.index((e2, v))
                psi, w = merge_with_weight(psi, q1, q2)
                weights.append(w)
                del labels[q2]
            labels = [(new_id, v) if e in (e1, e2) else (e, v) for e, v in labels]
            where[new_id] = where[e1]
        else:
            e, v = step.args
            q = labels.index((e, v))
            psi, w = disentangle_with_weight(psi, q)
            weights.append(w)
            del labels[q]
        block.labels, block.state = labels, psi
        good = equal_up_to_phase(psi.amplitudes, expected_network_state(labels))
        report.steps.append(StepRecord(step.op, step.args, weights, good))
    return report
