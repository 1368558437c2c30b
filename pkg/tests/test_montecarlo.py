"""Sampling layer: distributional checks, determinism, experiment records."""

import math
import os

import numpy as np
import pytest

from ringmoments.exact_moments import trace_moment_sq, trace_moment_uu
from ringmoments.montecarlo import (
    CSV_COLUMNS,
    ExperimentRecord,
    ProfileFamily,
    RateFit,
    estimate_trace_moment,
    extreme_eigenvalues,
    haar_batch,
    radius_rate_experiment,
    read_records_csv,
    read_records_jsonl,
    rng_stream,
    sample_A,
    sample_haar_unitary,
    spectrum_records,
    tail_experiment,
    write_records_csv,
    write_records_jsonl,
)
from ringmoments.profiles import SingularProfile


class TestSamplers:
    def test_unitarity(self):
        rng = rng_stream(7)
        for n in (1, 2, 5, 16):
            u = sample_haar_unitary(n, rng)
            assert u.shape == (n, n)
            assert np.max(np.abs(u @ u.conj().T - np.eye(n))) < 1e-10

    def test_batch_unitarity(self):
        rng = rng_stream(11)
        batch = haar_batch(6, 8, rng)
        assert batch.shape == (8, 6, 6)
        for u in batch:
            assert np.max(np.abs(u.conj().T @ u - np.eye(6))) < 1e-10

    def test_trace_second_moment_is_one(self):
        # E |tr U|^2 = 1 for Haar U at every n >= 1
        rng = rng_stream(3)
        n, count = 4, 20000
        batch = haar_batch(n, count, rng)
        traces = np.trace(batch, axis1=1, axis2=2)
        vals = np.abs(traces) ** 2
        se = vals.std(ddof=1) / math.sqrt(count)
        assert abs(vals.mean() - 1.0) < 4 * se

    def test_sample_A_singular_values(self):
        profile = SingularProfile.from_values([0.5, 1.0, 2.0, 3.5])
        rng = rng_stream(5)
        a = sample_A(profile, rng)
        sv = np.linalg.svd(a, compute_uv=False)
        assert np.allclose(sorted(sv), sorted(map(float, profile.values)), atol=1e-8)

    def test_spectral_radius_never_exceeds_top_value(self):
        profile = SingularProfile.uniform_grid(0.5, 4.0, 12)
        rng = rng_stream(9)
        for _ in range(25):
            hi, lo = extreme_eigenvalues(sample_A(profile, rng))
            assert hi <= float(profile.M) + 1e-8
            assert lo >= -1e-8

    def test_unitary_case_pins_both_extremes(self):
        profile = SingularProfile.constant(1.0, 8)
        rng = rng_stream(13)
        hi, lo = extreme_eigenvalues(sample_A(profile, rng))
        assert abs(hi - 1.0) < 1e-10
        assert abs(lo - 1.0) < 1e-10


class TestRngStreams:
    def test_same_stream_reproduces(self):
        a = rng_stream(42, 3).standard_normal(5)
        b = rng_stream(42, 3).standard_normal(5)
        assert np.array_equal(a, b)

    def test_streams_differ_by_index_and_seed(self):
        base = rng_stream(42, 0).standard_normal(5)
        assert not np.array_equal(base, rng_stream(42, 1).standard_normal(5))
        assert not np.array_equal(base, rng_stream(43, 0).standard_normal(5))


class TestEstimates:
    def test_estimator_matches_exact_uu(self):
        profile = SingularProfile.from_values([1.0, 2.0, 3.0])
        est = estimate_trace_moment(2, profile, samples=20000, seed=1)
        exact = float(trace_moment_uu(2, profile.to_exact()))
        tol = 4 * est.std_error + 1e-9 * abs(exact)
        assert abs(est.mean - exact) < tol
        assert est.statistic == "trace_uu"
        assert (est.samples, est.k, est.n) == (20000, 2, 3)

    def test_estimator_matches_exact_sq(self):
        profile = SingularProfile.from_values([1.0, 2.0, 3.0])
        est = estimate_trace_moment(2, profile, samples=20000, seed=2, mode="sq")
        exact = float(trace_moment_sq(2, profile.to_exact()))
        assert abs(est.mean - exact) < 4 * est.std_error + 1e-9 * abs(exact)
        assert est.statistic == "trace_sq"

    def test_order_one_uu_is_deterministic(self):
        # trace(A A*) equals the squared profile norm for every unitary pair
        profile = SingularProfile.from_values([1.0, 2.0])
        est = estimate_trace_moment(1, profile, samples=50, seed=0)
        assert abs(est.mean - 5.0) < 1e-10
        assert est.std_error < 1e-10

    def test_determinism_and_seed_sensitivity(self):
        profile = SingularProfile.from_values([1.0, 2.0, 3.0])
        a = estimate_trace_moment(2, profile, samples=500, seed=10)
        b = estimate_trace_moment(2, profile, samples=500, seed=10)
        c = estimate_trace_moment(2, profile, samples=500, seed=11)
        assert a == b
        assert a.mean != c.mean

    def test_validation(self):
        profile = SingularProfile.from_values([1.0, 2.0])
        with pytest.raises(ValueError):
            estimate_trace_moment(0, profile, samples=10, seed=0)
        with pytest.raises(ValueError):
            estimate_trace_moment(1, profile, samples=1, seed=0)
        with pytest.raises(ValueError):
            estimate_trace_moment(1, profile, samples=10, seed=0, mode="bad")


class TestProfileFamilies:
    def test_grid_and_constant_ignore_rng(self):
        rng = rng_stream(0)
        grid = ProfileFamily("grid", 0.5, 4.0).realize(6, rng)
        assert grid == SingularProfile.uniform_grid(0.5, 4.0, 6)
        const = ProfileFamily("constant", 2.0).realize(4, rng)
        assert const == SingularProfile.constant(2.0, 4)

    def test_uniform_random_in_range_and_stream_owned(self):
        fam = ProfileFamily("uniform-random", 0.5, 4.0)
        p1 = fam.realize(32, rng_stream(1, 0))
        p2 = fam.realize(32, rng_stream(1, 0))
        p3 = fam.realize(32, rng_stream(1, 1))
        assert p1 == p2
        assert p1 != p3
        assert all(0.5 <= float(v) <= 4.0 for v in p1.values)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ProfileFamily("weird").realize(3, rng_stream(0))


class TestSpectrumRecords:
    def test_schema_and_stats(self):
        fam = ProfileFamily("grid", 1.0, 2.0)
        records = spectrum_records(fam, [4, 8], replications=3, seed=6)
        assert len(records) == 2 * 3 * 4
        stats = {r.stat for r in records}
        assert stats == {
            "spectral_radius",
            "min_modulus",
            "radius_deviation",
            "min_deviation",
        }
        for r in records:
            assert r.seed == 6 and r.k == 1 and r.n in (4, 8)

    def test_jobs_do_not_change_output(self):
        fam = ProfileFamily("uniform-random", 0.5, 2.0)
        serial = spectrum_records(fam, [4, 6], replications=4, seed=8, jobs=1)
        parallel = spectrum_records(fam, [4, 6], replications=4, seed=8, jobs=2)
        assert serial == parallel

    def test_deviation_consistency(self):
        # rows arrive four per replication: radius, min, then both deviations
        fam = ProfileFamily("uniform-random", 0.5, 2.0)
        records = spectrum_records(fam, [6], replications=3, seed=3)
        for start in range(0, len(records), 4):
            radius, minimum, rdev, mdev = records[start : start + 4]
            assert rdev.value == radius.value - radius.b
            assert mdev.value == minimum.a - minimum.value

    def test_replication_validation(self):
        with pytest.raises(ValueError):
            spectrum_records(ProfileFamily("constant", 1.0), [4], 0, 0)


class TestRateExperiment:
    def test_fit_on_small_grid(self):
        fam = ProfileFamily("uniform-random", 0.5, 4.0)
        records, fit = radius_rate_experiment(fam, [8, 16], replications=6, seed=4)
        assert isinstance(fit, RateFit)
        assert len(fit.medians) == 2
        assert {n for n, _ in fit.medians} == {8, 16}
        assert any(r.stat == "radius_deviation" for r in records)
        if not fit.degenerate:
            assert fit.ci_low <= fit.slope <= fit.ci_high

    def test_degenerate_constant_profile(self):
        # a flat profile makes A unitary, every deviation is ~0 and the fit
        # must flag itself instead of extrapolating from noise
        fam = ProfileFamily("constant", 1.0)
        _, fit = radius_rate_experiment(fam, [4, 8], replications=3, seed=5)
        assert fit.degenerate
        assert fit.slope == 0.0


class TestTailExperiment:
    def test_monotone_and_vanishing_tails(self):
        profile = SingularProfile.uniform_grid(0.5, 2.0, 16)
        deltas = [0.0, 0.05, 0.1, 0.25, float(profile.M) - profile.b]
        _, points = tail_experiment(profile, 16, deltas, replications=40, seed=12)
        ps = [p.p_radius_above for p in points]
        qs = [p.p_min_below for p in points]
        assert all(x >= y for x, y in zip(ps, ps[1:]))
        assert all(x >= y for x, y in zip(qs, qs[1:]))
        # the radius never exceeds the largest singular value
        assert ps[-1] == 0.0
        assert all(0.0 <= x <= 1.0 for x in ps + qs)

    def test_dimension_mismatch(self):
        profile = SingularProfile.uniform_grid(0.5, 2.0, 8)
        with pytest.raises(ValueError):
            tail_experiment(profile, 16, [0.1], replications=2, seed=0)


class TestRecordIO:
    def make_records(self):
        fam = ProfileFamily("uniform-random", 0.5, 3.0)
        return spectrum_records(fam, [4, 6], replications=3, seed=17)

    def test_csv_round_trip_bit_exact(self, tmp_path):
        records = self.make_records()
        path = os.fspath(tmp_path / "records.csv")
        write_records_csv(records, path)
        assert read_records_csv(path) == records
        with open(path) as fh:
            header = fh.readline().strip()
        assert header == ",".join(CSV_COLUMNS)

    def test_csv_rewrite_identical_bytes(self, tmp_path):
        records = self.make_records()
        p1 = os.fspath(tmp_path / "a.csv")
        p2 = os.fspath(tmp_path / "b.csv")
        write_records_csv(records, p1)
        write_records_csv(read_records_csv(p1), p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_jsonl_round_trip(self, tmp_path):
        records = self.make_records()
        path = os.fspath(tmp_path / "records.jsonl")
        write_records_jsonl(records, path)
        assert read_records_jsonl(path) == records

    def test_bad_header_rejected(self, tmp_path):
        path = os.fspath(tmp_path / "bad.csv")
        with open(path, "w") as fh:
            fh.write("x,y\n1,2\n")
        with pytest.raises(ValueError):
            read_records_csv(path)

    def test_record_field_order(self):
        assert CSV_COLUMNS == ("n", "k", "seed", "stat", "value", "b", "a", "M", "m")
        r = ExperimentRecord(4, 1, 0, "spectral_radius", 1.5, 1.0, 0.5, 2.0, 0.5)
        assert [getattr(r, c) for c in CSV_COLUMNS] == [
            4, 1, 0, "spectral_radius", 1.5, 1.0, 0.5, 2.0, 0.5,
        ]
