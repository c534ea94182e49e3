"""Acceptance suite: one test per headline criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the CRITERION
lines as they pass; the test names mirror the criteria one to one.
"""

import time

import numpy as np
import pytest

from cepclust import clustering, distances, evaluation, lti, signals, spectral
from conftest import ar1_series

SEG128 = spectral.WelchConfig(segment_length=128)


def run_sweep(**overrides):
    settings = dict(
        series_lengths=(256, 1024, 4096),
        repetitions=10,
        pairs_per_system=(10, 5, 5),
        measures=("extended-cepstral", "cepstral", "euclidean", "keogh-lb"),
        master_seed=1000,
    )
    settings.update(overrides)
    return evaluation.run_experiment(evaluation.ExperimentConfig(**settings))


def test_criterion_1_desk_scale_sweep_recovers_systems():
    # 40 pairs per repetition at N = 2^8, 2^10, 2^12, 10 repetitions:
    # the headline measure must recover the two circuits exactly at every
    # length while the shape baselines stay at chance level, in < 5 min.
    start = time.perf_counter()
    report = run_sweep()
    elapsed = time.perf_counter() - start
    for length in (256, 1024, 4096):
        cell = report.cell("extended-cepstral", length)
        assert cell["ari_mean"] == 1.0 and cell["ari_std"] == 0.0
        for baseline in ("cepstral", "euclidean", "keogh-lb"):
            assert abs(report.cell(baseline, length)["ari_mean"]) <= 0.05
    assert elapsed < 300.0
    print(
        f"\nCRITERION 1: PASS - extended ARI 1.0 +- 0.0 at 2^8/2^10/2^12, "
        f"baselines within +-0.05, sweep took {elapsed:.1f}s"
    )


def test_criterion_2_white_noise_inputs_flip_the_baselines():
    # With white-noise inputs only, the output-only cepstral measure works
    # as well as the extended one; Euclidean and the Keogh bound stay at
    # chance on the standardized series.
    report = run_sweep(series_lengths=(1024,), pairs_per_system=(0, 0, 20))
    assert report.cell("extended-cepstral", 1024)["ari_mean"] == 1.0
    assert report.cell("cepstral", 1024)["ari_mean"] == 1.0
    euclid = report.cell("euclidean", 1024)["ari_mean"]
    keogh = report.cell("keogh-lb", 1024)["ari_mean"]
    assert abs(euclid) <= 0.1
    assert abs(keogh) <= 0.1
    print(
        f"\nCRITERION 2: PASS - white-noise-only: cepstral and extended ARI 1.0, "
        f"euclidean {euclid:+.4f}, keogh-lb {keogh:+.4f}"
    )


def test_criterion_3_known_model_norms_cluster_perfectly():
    report = run_sweep(series_lengths=(256,), measures=("h2", "hinf"))
    h2 = report.cell("h2", 256)
    hinf = report.cell("hinf", 256)
    assert h2["ari_mean"] == 1.0
    assert hinf["ari_mean"] >= 0.9
    print(
        f"\nCRITERION 3: PASS - ground-truth model norms: h2 ARI {h2['ari_mean']}, "
        f"hinf ARI {hinf['ari_mean']}"
    )


def test_criterion_4_near_linear_scaling_and_dtw_gap(circuit_pair):
    # (a) One extended-distance evaluation scales like N log N: every
    # consecutive doubling from 2^10 on costs at most 2.5x.
    def timed_distance(n):
        cfg = spectral.default_config(n)
        u1 = signals.gen_white_noise(n, 1.0, 900)
        u2 = signals.gen_white_noise(n, 1.0, 901)
        p1 = signals.IOPair(u1, lti.simulate(circuit_pair[0], u1), "a")
        p2 = signals.IOPair(u2, lti.simulate(circuit_pair[1], u2), "b")
        distances.extended_cepstral_distance(p1, p2, cfg)  # warm caches
        best = np.inf
        for _ in range(9):
            start = time.perf_counter()
            distances.extended_cepstral_distance(p1, p2, cfg)
            best = min(best, time.perf_counter() - start)
        return best

    lengths = [2**k for k in range(10, 17)]
    seconds = {n: timed_distance(n) for n in lengths}
    ratios = [seconds[b] / seconds[a] for a, b in zip(lengths, lengths[1:])]
    assert all(r <= 2.5 for r in ratios[:4])  # 2^10 -> 2^14
    assert ratios[-1] <= 2.5  # 2^15 -> 2^16

    # (b) At N = 2^12 the full extended matrix is at least 10x faster than
    # the exact-DTW matrix over the same 40 pairs.
    report = run_sweep(series_lengths=(4096,), repetitions=1,
                       measures=("extended-cepstral", "dtw"))
    ext_seconds = report.cell("extended-cepstral", 4096)["seconds_mean"]
    dtw_seconds = report.cell("dtw", 4096)["seconds_mean"]
    assert dtw_seconds >= 10.0 * ext_seconds
    print(
        f"\nCRITERION 4: PASS - doubling ratios {['%.2f' % r for r in ratios]}, "
        f"matrix at 2^12: extended {ext_seconds:.3f}s vs dtw {dtw_seconds:.1f}s "
        f"({dtw_seconds / ext_seconds:.0f}x)"
    )


def test_criterion_5_closed_form_oracles():
    # (a) Martin distance between AR(1) poles +-0.5.
    martin = distances.cepstral_distance(
        ar1_series(2**16, 0.5, 101), ar1_series(2**16, -0.5, 201), SEG128
    )
    target = np.log(1.5625 / 0.5625)
    assert martin == pytest.approx(target, rel=0.15)

    # (b) Cepstral norm of AR(1) pole 0.5.
    norm = distances.cepstral_norm(ar1_series(2**16, 0.5, 201), SEG128)
    norm_target = -np.log(1.0 - 0.25)
    assert norm == pytest.approx(norm_target, rel=0.20)

    # (c, d) H2 and H-infinity of H(z) = 1 / (z - 0.5).
    single_pole = lti.StateSpace([[0.5]], [[1.0]], [[1.0]], 0.0, 1.0)
    h2 = lti.h2_norm(single_pole)
    hinf = lti.hinf_norm(single_pole)
    assert h2 == pytest.approx(np.sqrt(4.0 / 3.0), abs=1e-9)
    assert hinf == pytest.approx(2.0, abs=1e-6)

    # (e) White-noise cepstrum vanishes off the origin.
    wn = signals.gen_white_noise(2**16, 1.0, 1)
    coefficients = spectral.power_cepstrum(wn, spectral.default_config(len(wn))).coefficients
    wn_peak = float(np.max(np.abs(coefficients[1:])))
    assert wn_peak <= 0.05
    print(
        f"\nCRITERION 5: PASS - martin {martin:.4f} (target {target:.4f}), "
        f"norm {norm:.4f} (target {norm_target:.4f}), h2 {h2:.9f}, hinf {hinf:.7f}, "
        f"wn cepstrum peak {wn_peak:.4f}"
    )


def test_criterion_6_structural_invariants(circuit_pair, small_dataset, rng):
    # FFT round trip.
    x = rng.normal(size=2048)
    assert np.max(np.abs(spectral.fft(spectral.fft(x), inverse=True) - x)) <= 1e-12

    # Keogh lower-bounds DTW on 100 random pairs.
    cfg = distances.DtwConfig(band_radius_fraction=0.1)
    for _ in range(100):
        a, b = rng.normal(size=64), rng.normal(size=64)
        assert distances.lb_keogh(a, b, cfg) <= distances.d_dtw_exact(a, b, cfg) + 1e-9

    # Exact symmetry of every series measure.
    a, b = rng.normal(size=256), rng.normal(size=256)
    assert distances.d_euclidean(a, b) == distances.d_euclidean(b, a)
    assert distances.d_dtw_exact(a, b, cfg) == distances.d_dtw_exact(b, a, cfg)
    assert distances.lb_keogh(a, b, cfg) == distances.lb_keogh(b, a, cfg)

    # ARI hand value.
    assert evaluation.adjusted_rand_index(
        [0, 0, 0, 1, 1, 1], [0, 0, 1, 1, 2, 2]
    ) == pytest.approx(0.24242424, abs=1e-4)

    # Matrix invariants and thread invariance on a real dataset.
    measure = evaluation.make_measure("extended-cepstral")
    serial = clustering.pairwise_matrix(small_dataset, measure, threads=1)
    threaded = clustering.pairwise_matrix(small_dataset, measure, threads=8)
    assert np.array_equal(serial.entries, serial.entries.T)
    assert np.all(np.diag(serial.entries) == 0)
    assert np.array_equal(serial.entries, threaded.entries)

    # Seed determinism of the full harness.
    kwargs = dict(series_lengths=(256,), repetitions=2, pairs_per_system=(1, 1, 1),
                  measures=("extended-cepstral", "euclidean"), master_seed=77)
    first = [(r["measure"], r["repetition"], r["ari"]) for r in run_sweep(**kwargs).rows]
    second = [(r["measure"], r["repetition"], r["ari"]) for r in run_sweep(**kwargs).rows]
    assert first == second
    print(
        "\nCRITERION 6: PASS - fft round trip, keogh <= dtw x100, exact symmetry, "
        "ARI hand value, matrix invariants, thread and seed determinism"
    )
