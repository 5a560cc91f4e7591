import numpy as np
import pytest

from cliquemem import (
    ClusterLayout,
    ConnectionMatrix,
    InfeasibleConfigError,
    decode_sequence,
    density_seq,
    random_symbol_sequences,
    sber,
    schedule_density,
    sequence_exact,
    sqer,
    sqer_seq,
    store_sequence,
    store_sequences,
)
from cliquemem.rng import substream
from cliquemem.tournament import DecodedSequence


def test_store_minimal_sequence_pair_count():
    # L = r + 1 positions produce r + (r-1) + ... + 1 forward pairs
    lay = ClusterLayout(8, 4)
    m = ConnectionMatrix(lay, directed=True)
    store_sequence(m, [0, 1, 2, 3], r=3)
    assert m.count_connections() == 6


def test_downstream_wrap_schedule():
    # with chi=8, r=3 the 7th position (cluster 6) feeds positions 7, 8, 9
    # living in clusters 7, 0 and 1
    lay = ClusterLayout(8, 8)
    m = ConnectionMatrix(lay, directed=True)
    seq = list(range(8)) + [3, 4]
    store_sequence(m, seq, r=3)
    src = lay.fanal(6, seq[6])
    assert m.connected(src, lay.fanal(7, seq[7]))
    assert m.connected(src, lay.fanal(0, seq[8]))
    assert m.connected(src, lay.fanal(1, seq[9]))
    assert not m.connected(src, lay.fanal(5, seq[5]))


def test_store_sequence_idempotent():
    lay = ClusterLayout(8, 8)
    seq = [1, 2, 3, 4, 5, 6, 7, 0]
    m1 = ConnectionMatrix(lay, directed=True)
    store_sequence(m1, seq, r=3)
    m2 = m1.copy()
    store_sequence(m2, seq, r=3)
    assert m1.same_bits(m2)


def test_store_guards():
    lay = ClusterLayout(8, 8)
    m = ConnectionMatrix(lay, directed=True)
    with pytest.raises(InfeasibleConfigError):
        store_sequence(m, [0, 1, 2], r=8)
    with pytest.raises(InfeasibleConfigError):
        store_sequence(m, [0, 1, 2], r=3, wrap=True)  # chi does not divide L
    with pytest.raises(ValueError):
        store_sequence(m, [0, 1, 8], r=3)


def test_batch_store_matches_loop():
    lay = ClusterLayout(8, 16)
    seqs = random_symbol_sequences(substream(1), 20, 24, 16)
    m1 = ConnectionMatrix(lay, directed=True)
    store_sequences(m1, seqs, r=3, chunk=7)
    m2 = ConnectionMatrix(lay, directed=True)
    for row in seqs:
        store_sequence(m2, row, r=3)
    assert m1.same_bits(m2)


def test_single_sequence_exact_recall():
    lay = ClusterLayout(8, 32)
    m = ConnectionMatrix(lay, directed=True)
    seq = random_symbol_sequences(substream(2), 1, 40, 32)[0]
    store_sequence(m, seq, r=3)
    dec = decode_sequence(m, seq[:3], r=3, length=40)
    assert np.array_equal(dec.symbols, seq)
    assert not dec.ambiguous.any()
    assert sequence_exact(seq, dec)


def test_mid_sequence_cue_matches_front_decoding():
    lay = ClusterLayout(8, 32)
    m = ConnectionMatrix(lay, directed=True)
    seqs = random_symbol_sequences(substream(3), 10, 24, 32)
    store_sequences(m, seqs, r=3)
    ref = seqs[0]
    front = decode_sequence(m, ref[:3], r=3, length=24)
    mid = decode_sequence(m, ref[5:8], r=3, length=24, start=5)
    assert np.array_equal(front.symbols[8:], mid.symbols[3:])
    assert np.array_equal(ref, front.symbols)


def test_sber_counting():
    ref = np.arange(10)
    exact = DecodedSequence(symbols=ref.copy(), ambiguous=np.zeros(10, bool),
                            start=0, cue_length=2)
    assert sber(ref, exact) == 0.0

    wrong = DecodedSequence(symbols=np.full(10, 99), ambiguous=np.zeros(10, bool),
                            start=0, cue_length=2)
    assert sber(ref, wrong) == 1.0

    one_off = DecodedSequence(symbols=ref.copy(), ambiguous=np.zeros(10, bool),
                              start=0, cue_length=2)
    one_off.symbols[5] = 99
    assert sber(ref, one_off) == pytest.approx(1 / 8)

    # an ambiguous position counts as an error even if the symbol matches
    flagged = DecodedSequence(symbols=ref.copy(), ambiguous=np.zeros(10, bool),
                              start=0, cue_length=2)
    flagged.ambiguous[4] = True
    assert sber(ref, flagged) == pytest.approx(1 / 8)


def test_sber_denominator_excludes_cue():
    ref = np.zeros(100, np.int64)
    dec = DecodedSequence(symbols=ref.copy(), ambiguous=np.zeros(100, bool),
                          start=0, cue_length=4)
    dec.symbols[10] = 1
    assert sber(ref, dec) == pytest.approx(1 / 96)


def test_sqer_counting():
    assert sqer([False] * 10) == 0.0
    assert sqer([False] * 99 + [True]) == pytest.approx(0.01)
    with pytest.raises(ValueError):
        sqer([])


def test_capacity_operating_point_chain_of_order_eight():
    # chi=8, l=512, r=3, L=16 stores 1513 sequences at the 1% error target;
    # the model sits exactly on the target and the simulation within the
    # finite-size wobble of the boundary
    assert sqer_seq(8, 512, 3, 16, 1513) <= 0.01
    lay = ClusterLayout(8, 512)
    m = ConnectionMatrix(lay, directed=True)
    corpus = random_symbol_sequences(substream(5, 0), 1513, 16, 512)
    store_sequences(m, corpus, 3)
    fails = []
    for trial in range(1000):
        rng = substream(5, 1, trial)
        ref = corpus[int(rng.integers(0, 1513))]
        fails.append(not sequence_exact(ref, decode_sequence(m, ref[:3], 3, 16)))
    assert sqer(fails) <= 0.025


def test_density_matches_model_truncated_low_anticipation():
    # the closed form assumes every pairing completes; with the pairing
    # stopping at the sequence end the shortfall stays inside 2% for small r
    lay = ClusterLayout(20, 205)
    model = density_seq(20, 205, 3000, 100)
    m = ConnectionMatrix(lay, directed=True)
    store_sequences(m, random_symbol_sequences(substream(6), 3000, 100, 205), r=2)
    measured = schedule_density(m, 2)
    assert abs(measured - model) / model < 0.02


def test_density_matches_model_wrapped_any_anticipation():
    lay = ClusterLayout(20, 205)
    model = density_seq(20, 205, 3000, 100)
    m = ConnectionMatrix(lay, directed=True)
    store_sequences(m, random_symbol_sequences(substream(7), 3000, 100, 205),
                    r=19, wrap=True)
    assert abs(schedule_density(m, 19) - model) / model < 0.005


def test_density_independent_of_anticipation_degree():
    # wrapped pairing realizes the idealized per-pair statistics, under which
    # the load per eligible pair must agree across r within Monte-Carlo noise
    lay = ClusterLayout(8, 64)
    runs = 8
    means = {}
    spreads = {}
    for r in (2, 7):
        vals = []
        for run in range(runs):
            m = ConnectionMatrix(lay, directed=True)
            seqs = random_symbol_sequences(substream(8, r, run), 5, 2400, 64)
            store_sequences(m, seqs, r, wrap=True)
            vals.append(schedule_density(m, r))
        means[r] = np.mean(vals)
        spreads[r] = np.std(vals, ddof=1) / np.sqrt(runs)
    gap = abs(means[2] - means[7])
    sigma = np.hypot(spreads[2], spreads[7])
    assert gap <= 3 * sigma


def test_deterministic_replay():
    lay = ClusterLayout(8, 32)
    builds = []
    for _ in range(2):
        m = ConnectionMatrix(lay, directed=True)
        seqs = random_symbol_sequences(substream(9, 0), 30, 24, 32)
        store_sequences(m, seqs, 3)
        dec = decode_sequence(m, seqs[4][:3], 3, 24)
        builds.append((m, dec.symbols.copy()))
    assert builds[0][0].same_bits(builds[1][0])
    assert np.array_equal(builds[0][1], builds[1][1])
