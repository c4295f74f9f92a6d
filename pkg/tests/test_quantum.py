import cmath
import itertools

import numpy as np
import pytest

from hyperimmerse.derivation import DerivationSequence, Step, immersion_to_derivation
from hyperimmerse.hypergraph import Hypergraph
from hyperimmerse.immersion import ImmersionMap
from hyperimmerse.quantum import (MAX_QUBITS, PureState, QuantumError, apply_disentangle, apply_local,
                                  apply_merge_projector, disentangle_with_weight, equal_up_to_phase, ghz,
                                  is_ghz_equivalent, merge_with_weight, product, qubit_assignment,
                                  simulate_derivation)


def amps(*pairs, n):
    a = np.zeros(1 << n, dtype=complex)
    for i, x in pairs:
        a[i] = x
    return a


def test_ghz_amplitudes():
    s = 1 / np.sqrt(2)
    assert np.allclose(ghz(2).amplitudes, amps((0, s), (3, s), n=2))
    assert np.allclose(ghz(3).amplitudes, amps((0, s), (7, s), n=3))
    assert np.allclose(ghz(1).amplitudes, [s, s])


@pytest.mark.parametrize("r", [0, MAX_QUBITS + 1])
def test_ghz_range(r):
    with pytest.raises(QuantumError):
        ghz(r)


def test_merge_examples():
    s, w = apply_merge_projector(product([ghz(2), ghz(2)]), 1, 2)
    assert is_ghz_equivalent(s, 3) and w > 0
    s, w = apply_merge_projector(product([ghz(3), ghz(2)]), 2, 3)
    assert is_ghz_equivalent(s, 4) and w > 0


def test_merge_zero_norm():
    with pytest.raises(QuantumError):
        apply_merge_projector(PureState(amps((1, 1), n=2)), 0, 1)


def test_merge_bad_qubits():
    with pytest.raises(QuantumError):
        apply_merge_projector(ghz(2), 0, 0)
    with pytest.raises(QuantumError):
        apply_merge_projector(ghz(2), 0, 2)


def test_merge_by_hand():
    # |psi> = a|00> + b|01> + c|10> + d|11>; M keeps a|0> + d|1>
    a, b, c, d = 0.5, 0.1, 0.3, 0.8
    s, w = merge_with_weight(PureState([a, b, c, d]), 0, 1)
    assert w == pytest.approx(a * a + d * d)
    assert np.allclose(s.amplitudes, np.array([a, d]) / np.hypot(a, d))


def test_disentangle_by_hand():
    # M' maps a|0> + b|1> on the dropped qubit to (a + b)|0>
    s, w = disentangle_with_weight(PureState([0.6, 0.0, 0.0, 0.8]), 1)
    assert w == pytest.approx(0.36 + 0.64)
    assert np.allclose(s.amplitudes, [0.6, 0.8])


def test_disentangle_examples():
    for q in range(3):
        assert is_ghz_equivalent(apply_disentangle(ghz(3), q), 2)
    assert is_ghz_equivalent(apply_disentangle(ghz(2), 1), 1)
    assert is_ghz_equivalent(apply_disentangle(apply_disentangle(ghz(4), 0), 2), 2)


@pytest.mark.parametrize("r1,r2", list(itertools.product(range(2, 6), repeat=2)))
def test_merge_homomorphism(r1, r2):
    base = product([ghz(r1), ghz(r2)])
    for q1 in range(r1):
        for q2 in range(r1, r1 + r2):
            s, w = merge_with_weight(base, q1, q2)
            assert is_ghz_equivalent(s, r1 + r2 - 1) and w > 0
            assert abs(s.norm() - 1) < 1e-12


@pytest.mark.parametrize("r", range(2, 11))
def test_disentangle_homomorphism(r):
    for q in range(r):
        s, w = disentangle_with_weight(ghz(r), q)
        assert is_ghz_equivalent(s, r - 1) and w > 0
        assert abs(s.norm() - 1) < 1e-12


def test_ghz_equivalence_examples():
    assert is_ghz_equivalent(ghz(3), 3)
    phase = cmath.exp(0.73j)
    assert is_ghz_equivalent(PureState(phase * ghz(3).amplitudes), 3)
    assert not is_ghz_equivalent(PureState(amps((0, 1), n=3)), 3)
    assert not is_ghz_equivalent(ghz(3), 2)
    assert not equal_up_to_phase([1, 0], [1, 0, 0, 0])


def test_local_rotation_keeps_norm():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    s = apply_local(ghz(3), 1, h)
    assert abs(s.norm() - 1) < 1e-12 and not is_ghz_equivalent(s, 3)
    assert is_ghz_equivalent(apply_local(s, 1, h), 3)
    with pytest.raises(QuantumError):
        apply_local(ghz(2), 0, np.eye(3))


def test_bad_amplitude_count():
    with pytest.raises(QuantumError):
        PureState([1, 0, 0])


# -- derivations ---------------------------------------------------------------------


PATH = Hypergraph.from_edges({"ab": "ab", "bc": "bc"})


def test_path_lifting_gives_bell_pair():
    seq = immersion_to_derivation(Hypergraph.from_edges({"x": "ac"}), PATH,
                                  ImmersionMap({"a": "a", "c": "c"}, {"x": ("ab", "bc")}))
    report = simulate_derivation(PATH, seq)
    assert report.ok
    assert report.labels == [("ab", "a"), ("ab", "c")]
    assert is_ghz_equivalent(report.blocks[0].state, 2)


def test_empty_derivation():
    seq = DerivationSequence(PATH.edge_ids, (), ())
    report = simulate_derivation(PATH, seq)
    assert report.ok and report.steps == [] and report.n_qubits == 4


def test_two_triples_merge_to_five():
    g = Hypergraph.from_edges({"p": "abc", "q": "cde"})
    seq = DerivationSequence(("p", "q"), (), (Step("coalesce", ("p", "q", "pq")),))
    report = simulate_derivation(g, seq)
    assert report.ok and is_ghz_equivalent(report.blocks[0].state, 5)
    assert report.steps[0].weights[0] > 0


def test_commuting_steps():
    g = Hypergraph.from_edges({"p": "abc", "q": "cd", "r": "ef", "s": "fgh"})
    one = (Step("coalesce", ("p", "q", "p")), Step("dewet", ("s", "h")))
    two = (Step("dewet", ("s", "h")), Step("coalesce", ("p", "q", "p")))
    ra = simulate_derivation(g, DerivationSequence(g.edge_ids, (), one))
    rb = simulate_derivation(g, DerivationSequence(g.edge_ids, (), two))
    assert ra.ok and rb.ok and ra.labels == rb.labels
    for x, y in zip(ra.blocks, rb.blocks):
        assert np.allclose(x.state.amplitudes, y.state.amplitudes, atol=1e-9)


def test_qubit_assignment_order():
    g = Hypergraph.from_edges({"b": "yx", "a": "z"})
    assert qubit_assignment(g) == [("a", "z"), ("b", "x"), ("b", "y")]


def test_block_limit():
    g = Hypergraph.from_edges({"p": "abcdefgh", "q": "hijklmno"})
    seq = DerivationSequence(("p", "q"), (), (Step("coalesce", ("p", "q", "p")),))
    with pytest.raises(QuantumError):
        simulate_derivation(g, seq)


def test_table_lists_every_step():
    g = Hypergraph.from_edges({"p": "abc"})
    seq = DerivationSequence(("p",), (), (Step("dewet", ("p", "a")), Step("dewet", ("p", "b"))))
    text = simulate_derivation(g, seq).table()
    assert text.count("pass") == 3 and "FAIL" not in text
