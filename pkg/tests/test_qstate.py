import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import BELL, GHZ, distribution
from qsslab.qstate import (
    BELL_ORDER,
    Basis,
    BellOutcome,
    KkiSignal,
    PauliOp,
    PureState,
    apply_pauli,
    bell,
    bell_decompose,
    computational,
    ghz3,
    inner,
    kki_source,
    make_ket,
    measure_bell,
    measure_one,
    outcome_distribution,
    same_up_to_phase,
    tensor,
)

s = 1 / np.sqrt(2)


@st.composite
def states(draw, n=None):
    n = draw(st.integers(1, 4)) if n is None else n
    re = draw(st.lists(st.floats(-1, 1), min_size=2**n, max_size=2**n))
    im = draw(st.lists(st.floats(-1, 1), min_size=2**n, max_size=2**n))
    v = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(v) < 1e-3:
        v[0] = 1
    return PureState(tuple("ABCDE"[:n]), v / np.linalg.norm(v))


def test_make_ket_examples():
    assert np.allclose(make_ket(0, Basis.Z).amplitudes, [1, 0])
    assert np.allclose(make_ket(0, Basis.X).amplitudes, [s, s])
    assert np.allclose(make_ket(1, Basis.Y).amplitudes, [s, -1j * s])


def test_make_ket_rejects_bad_bit():
    with pytest.raises(ValueError):
        make_ket(2, Basis.Z)


def test_state_validation():
    with pytest.raises(ValueError):
        PureState(("A",), [1, 1])
    with pytest.raises(ValueError):
        PureState(("A", "A"), [1, 0, 0, 0])
    with pytest.raises(ValueError):
        PureState(("A",), [1, 0, 0, 0])
    with pytest.raises(ValueError):
        PureState(("A",), [np.nan, 0])


def test_tensor():
    ab = tensor(make_ket(0, Basis.Z, "A"), make_ket(1, Basis.Z, "B"))
    assert ab.labels == ("A", "B")
    assert np.allclose(ab.amplitudes, computational("01", "AB").amplitudes)
    plus = tensor(make_ket(0, Basis.X, "A"), make_ket(0, Basis.X, "B"))
    assert np.allclose(plus.amplitudes, [0.5] * 4)
    five = tensor(ghz3(), bell(BellOutcome.PHI_PLUS, ("B'", "C'")))
    assert abs(five.norm() - 1) < 1e-12
    with pytest.raises(ValueError):
        tensor(ghz3(), make_ket(0, Basis.Z, "A"))


def test_ghz3():
    g = ghz3(("A", "B", "C"))
    expected = np.zeros(8)
    expected[[0, 7]] = s
    assert np.allclose(g.amplitudes, expected)
    assert abs(g.norm() - 1) < 1e-12
    with pytest.raises(ValueError):
        ghz3(("A", "B"))
    dist = outcome_distribution(g, [Basis.X] * 3)
    assert all(p == pytest.approx(0.0, abs=1e-12) for bits, p in dist.items() if sum(bits) % 2)


def test_bell_states():
    assert np.allclose(bell(BellOutcome.PHI_PLUS, "AB").amplitudes, [s, 0, 0, s])
    assert np.allclose(bell(BellOutcome.PSI_MINUS, "AB").amplitudes, [0, s, -s, 0])
    for a, b in itertools.combinations(BELL_ORDER, 2):
        assert abs(inner(bell(a, "AB"), bell(b, "AB"))) < 1e-12
    with pytest.raises(ValueError):
        bell(BellOutcome.PHI_PLUS, "ABC")


def test_kki_sources():
    assert np.allclose(kki_source(KkiSignal.CAP_PSI_PLUS).amplitudes, [0.5, 0.5, 0.5, -0.5])
    assert np.allclose(kki_source(KkiSignal.CAP_PHI_MINUS).amplitudes, [0.5, -0.5, -0.5, -0.5])
    # overlaps follow from the defining combinations: psi+ / phi- orthogonal,
    # capital states orthogonal to each other, cross overlaps 1/sqrt2
    expected = {
        frozenset({KkiSignal.PSI_PLUS, KkiSignal.PHI_MINUS}): 0.0,
        frozenset({KkiSignal.CAP_PSI_PLUS, KkiSignal.CAP_PHI_MINUS}): 0.0,
    }
    for a, b in itertools.combinations(KkiSignal, 2):
        ov = abs(inner(kki_source(a), kki_source(b)))
        assert ov == pytest.approx(expected.get(frozenset({a, b}), s), abs=1e-12)


def test_apply_pauli():
    zero = make_ket(0, Basis.Z, "A")
    one = make_ket(1, Basis.Z, "A")
    assert apply_pauli(zero, "A", PauliOp.I) is zero
    assert np.allclose(apply_pauli(zero, "A", PauliOp.X).amplitudes, one.amplitudes)
    assert np.allclose(apply_pauli(zero, "A", PauliOp.XZ).amplitudes, one.amplitudes)
    assert np.allclose(apply_pauli(one, "A", PauliOp.XZ).amplitudes, -zero.amplitudes)
    with pytest.raises(KeyError):
        apply_pauli(zero, "B", PauliOp.X)


def test_xz_matches_u1_up_to_sign():
    # U1 = |0><1| - |1><0|
    u1 = np.array([[0, 1], [-1, 0]])
    for bit in (0, 1):
        k = make_ket(bit, Basis.Z, "A")
        via_u1 = PureState(("A",), u1 @ k.amplitudes)
        assert same_up_to_phase(apply_pauli(k, "A", PauliOp.XZ), via_u1)


def test_measure_one_examples():
    assert measure_one(make_ket(0, Basis.X, "A"), "A", Basis.X, 0.999)[0] == 0
    bit, rest = measure_one(ghz3(), "A", Basis.Z, 0.3)
    assert bit == 0
    assert rest.labels == ("B", "C")
    assert np.allclose(rest.amplitudes, computational("00", "BC").amplitudes)
    bit, rest = measure_one(ghz3(), "A", Basis.Z, 0.7)
    assert bit == 1 and np.allclose(rest.amplitudes, computational("11", "BC").amplitudes)


def test_phi_plus_in_x_gives_equal_bits():
    # oracle: full distribution has support only on equal bits
    dist = distribution(BELL["phi+"], "XX")
    assert dist[(0, 1)] == pytest.approx(0) and dist[(1, 0)] == pytest.approx(0)
    for u1, u2 in itertools.product(np.linspace(0, 0.99, 12), repeat=2):
        b1, rest = measure_one(bell(BellOutcome.PHI_PLUS, "AB"), "A", Basis.X, u1)
        b2, _ = measure_one(rest, "B", Basis.X, u2)
        assert b1 == b2


def test_measure_rejects_bad_rand():
    with pytest.raises(ValueError):
        measure_one(ghz3(), "A", Basis.Z, 1.0)


def test_zero_probability_branch_never_chosen():
    one = make_ket(1, Basis.Z, "A")
    for u in (0.0, 0.5, np.nextafter(1, 0)):
        assert measure_one(one, "A", Basis.Z, u)[0] == 1


def test_measure_bell_examples():
    five = tensor(ghz3(), bell(BellOutcome.PHI_PLUS, ("B'", "C'")))
    outcome, residual = measure_bell(five, "C", "B'", 0.1)
    assert outcome is BellOutcome.PHI_PLUS
    want = PureState(("A", "B", "C'"), GHZ)
    assert same_up_to_phase(residual, want)
    for u in (0.0, 0.3, 0.9):
        assert measure_bell(bell(BellOutcome.PSI_MINUS, "XY"), "X", "Y", u)[0] is BellOutcome.PSI_MINUS


def test_bell_decompose_generic_pair():
    rng = np.random.default_rng(7)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    a, b, c, d = v
    joint = tensor(PureState(("B", "C"), v), bell(BellOutcome.PHI_PLUS, ("B'", "C'")))
    branches = {o: r for o, _, r in bell_decompose(joint, "C", "B'")}
    want = PureState(("B", "C'"), [a, -b, c, -d])
    assert same_up_to_phase(branches[BellOutcome.PHI_MINUS], want)


def test_bell_decompose_product_state():
    branches = bell_decompose(computational("00", "AB"), "A", "B")
    probs = {o: p for o, p, _ in branches}
    assert probs[BellOutcome.PHI_PLUS] == pytest.approx(0.5, abs=1e-12)
    assert probs[BellOutcome.PHI_MINUS] == pytest.approx(0.5, abs=1e-12)
    assert [r for o, p, r in branches if p == 0] == [None, None]
    # both qubits measured: residual is the empty state
    assert branches[0][2].labels == ()


def test_same_up_to_phase():
    st_ = ghz3()
    assert same_up_to_phase(st_, st_)
    assert same_up_to_phase(st_, PureState(st_.labels, -st_.amplitudes))
    assert not same_up_to_phase(bell(BellOutcome.PHI_PLUS, "AB"), bell(BellOutcome.PHI_MINUS, "AB"))
    with pytest.raises(ValueError):
        same_up_to_phase(bell(BellOutcome.PHI_PLUS, "AB"), bell(BellOutcome.PHI_PLUS, "BA"))


def test_outcome_distribution_examples():
    g = ghz3()
    xxx = outcome_distribution(g, [Basis.X] * 3)
    for bits, p in xxx.items():
        assert p == pytest.approx(0.25 if sum(bits) % 2 == 0 else 0.0, abs=1e-12)
    yyx = outcome_distribution(g, {"A": Basis.Y, "B": Basis.Y, "C": Basis.X})
    for bits, p in yyx.items():
        assert p == pytest.approx(0.25 if sum(bits) % 2 == 1 else 0.0, abs=1e-12)
    zz = outcome_distribution(bell(BellOutcome.PSI_PLUS, "BC"), [Basis.Z, Basis.Z])
    assert zz == pytest.approx({(0, 0): 0, (0, 1): 0.5, (1, 0): 0.5, (1, 1): 0})


@pytest.mark.parametrize("bases", list(itertools.product("XYZ", repeat=3)))
def test_outcome_distribution_matches_oracle(bases):
    got = outcome_distribution(ghz3(), [Basis(b) for b in bases])
    want = distribution(GHZ, bases)
    for k in want:
        assert got[k] == pytest.approx(want[k], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(states(), st.sampled_from(list(Basis)), st.floats(0, 0.999999))
def test_measurement_preserves_norm(state, basis, u):
    _, rest = measure_one(state, state.labels[0], basis, u)
    assert abs(rest.norm() - 1) < 1e-12


@settings(max_examples=60, deadline=None)
@given(states(), st.sampled_from(list(Basis)))
def test_distribution_sums_to_one_and_matches_oracle(state, basis):
    got = outcome_distribution(state, [basis] * state.n_qubits)
    assert sum(got.values()) == pytest.approx(1, abs=1e-12)
    want = distribution(state.amplitudes, basis.value * state.n_qubits)
    for k in want:
        assert got[k] == pytest.approx(want[k], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(states(n=3), st.sampled_from(list(itertools.permutations("ABC", 2))))
def test_bell_decomposition_is_complete(state, pair):
    l1, l2 = pair
    branches = bell_decompose(state, l1, l2)
    assert sum(p for _, p, _ in branches) == pytest.approx(1, abs=1e-12)
    rebuilt = np.zeros(8, dtype=complex)
    for outcome, p, residual in branches:
        if residual is None:
            continue
        assert abs(residual.norm() - 1) < 1e-12
        part = tensor(bell(outcome, pair), residual).reorder(state.labels)
        # residual is normalized; the branch amplitude is sqrt(p) with the phase kept in the residual
        rebuilt += np.sqrt(p) * part.amplitudes
    assert abs(np.vdot(state.amplitudes, rebuilt)) >= 1 - 1e-10


@settings(max_examples=40, deadline=None)
@given(states(), st.sampled_from([PauliOp.X, PauliOp.Z, PauliOp.XZ]))
def test_pauli_twice_is_identity_up_to_phase(state, op):
    twice = apply_pauli(apply_pauli(state, state.labels[-1], op), state.labels[-1], op)
    assert abs(twice.norm() - 1) < 1e-12
    assert same_up_to_phase(twice, state)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1), st.sampled_from(list(Basis)), st.floats(0, 0.999999))
def test_eigenstate_determinism(bit, basis, u):
    assert measure_one(make_ket(bit, basis, "A"), "A", basis, u)[0] == bit


def test_born_consistency():
    # 1e5 samples of qubit A of a fixed random 2-qubit state, within 4 standard errors
    rng = np.random.default_rng(2024)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    state = PureState(("A", "B"), v / np.linalg.norm(v))
    p0 = sum(p for bits, p in distribution(state.amplitudes, "YZ").items() if bits[0] == 0)
    n = 100_000
    zeros = sum(measure_one(state, "A", Basis.Y, u)[0] == 0 for u in rng.random(n))
    se = np.sqrt(p0 * (1 - p0) / n)
    assert abs(zeros / n - p0) < 4 * se


def test_reorder_roundtrip():
    g = tensor(ghz3(), make_ket(1, Basis.Y, "D"))
    r = g.reorder(("D", "C", "A", "B"))
    assert r.labels == ("D", "C", "A", "B")
    assert np.allclose(r.reorder(g.labels).amplitudes, g.amplitudes)
