import dataclasses
import math

import numpy as np
import pytest

from suita_lab import sublevel as sl
from suita_lab import verify as vf
from suita_lab.errors import NoCriticalPoint, SkippedDegenerate
from suita_lab.geometry import Disc, PolarComplement, parse_domain


class TestSuitaCheck:
    def test_disc_center_equality(self, unit_disc):
        checks = vf.suita_check(unit_disc, 0j, 3)
        assert len(checks) == 4
        for c in checks:
            assert c.passed
            assert abs(c.margin) <= 1e-8 * max(abs(c.lhs), abs(c.rhs))

    def test_annulus_strict(self, annulus_half):
        checks = vf.suita_check(annulus_half, 0.7 + 0j, 0)
        assert checks[0].passed
        assert checks[0].margin > 0

    def test_polar_degenerate(self):
        checks = vf.suita_check(PolarComplement(), 1 + 0j, 0)
        assert checks[0].passed
        assert checks[0].lhs == checks[0].rhs == 0.0

    def test_jmax_guard(self, unit_disc):
        with pytest.raises(ValueError):
            vf.suita_check(unit_disc, 0j, 7)


class TestThm1Check:
    def test_disc_example(self, unit_disc):
        checks = vf.thm1_check(unit_disc, 0j, r_list=[0.6])
        by_r = checks[0]
        assert by_r.lhs == pytest.approx(1 / math.pi, rel=1e-10)
        assert by_r.rhs == pytest.approx(1.0 / (-2 * math.pi * 0.36 * math.log(0.6)), rel=1e-6)
        assert by_r.passed

    def test_golden_radius_included(self, unit_disc):
        checks = vf.thm1_check(unit_disc, 0j)
        golden = (math.sqrt(5) - 1) / 2
        assert any(abs(float(c.params.split(";")[0].split("=")[1]) - golden) < 1e-9 for c in checks)
        assert all(c.passed for c in checks)

    def test_annulus_radii(self, annulus_half):
        checks = vf.thm1_check(annulus_half, 0.7 + 0j, r_list=[0.1, 0.15, 0.2])
        assert all(c.passed for c in checks)


class TestThm2Check:
    def test_constant_value(self):
        assert vf.THM2_CONSTANT == pytest.approx((11 + 5 * math.sqrt(5)) / (4 * math.pi), rel=1e-15)

    def test_centered_disc_degenerate(self, unit_disc):
        with pytest.raises(SkippedDegenerate):
            vf.thm2_check(unit_disc, 0j)

    def test_offcenter_disc(self, unit_disc):
        c = vf.thm2_check(unit_disc, 0.5 + 0j)
        # delta = 0.5, cap = 4/3, delta*cap = 2/3
        assert c.rhs == pytest.approx(vf.THM2_CONSTANT / (0.25 * math.log(1.5)), rel=1e-10)
        assert c.passed

    def test_annulus(self, annulus_half):
        assert vf.thm2_check(annulus_half, 0.7 + 0j).passed


class TestPoissonCheck:
    def test_disc_center(self, unit_disc):
        c = vf.poisson_step_check(unit_disc, 0j, 0.5)
        assert c.lhs == pytest.approx(math.log(0.5), abs=1e-8)
        assert c.rhs == 0.0  # log(R c) = log 1
        assert c.passed

    def test_offcenter_both_negative(self, unit_disc):
        c = vf.poisson_step_check(unit_disc, 0.5 + 0j, 0.25)
        assert c.lhs < 0 and c.rhs < 0
        assert c.passed

    def test_annulus(self, annulus_half):
        assert vf.poisson_step_check(annulus_half, 0.7 + 0j, 0.1).passed


@pytest.fixture(scope="module")
def profile():
    return sl.profile_scan(Disc(0j, 1.0), 0j, -2.0, -0.2, 10, 256)


class TestBlbCheck:

    def test_disc_equality(self, unit_disc, profile):
        checks = vf.blb_check(unit_disc, 0j, profile)
        lower = [c for c in checks if c.name.startswith("blb_lower")]
        assert len(lower) == 10
        for c in lower:
            assert c.passed
            assert abs(c.margin) <= 1e-5 * c.rhs
        mono = [c for c in checks if c.name == "blb_monotone"]
        assert len(mono) == 1 and mono[0].passed

    def test_corrupted_profile_fails(self, unit_disc, profile):
        lam = profile.lam.copy()
        lam[4] *= 1.01
        bad = dataclasses.replace(
            profile,
            lam=lam,
            log_lambda=np.log(lam),
            e2t_lambda=np.exp(-2 * profile.t_samples) * lam,
        )
        checks = vf.blb_check(unit_disc, 0j, bad)
        assert any(not c.passed for c in checks)


class TestThm4Scan:
    def test_annulus_detects(self, annulus_half):
        report, check = vf.thm4_scan(annulus_half, 0.7 + 0j, resolution=512, steps=48)
        assert report.verdict == "NonConvexDetected"
        assert check.passed
        assert check.lhs < -report.noise_floor

    def test_disc_raises(self, unit_disc):
        with pytest.raises(NoCriticalPoint):
            vf.thm4_scan(unit_disc, 0.3 + 0j)


class TestCharacterization:
    def test_probe_families(self, annulus_half, unit_disc):
        checks = vf.characterization_probe(
            [(annulus_half, 0.7 + 0j), (unit_disc, 0j), (PolarComplement(), 1 + 0j)]
        )
        pos = [c for c in checks if c.name.startswith("char_pos")]
        zero = [c for c in checks if c.name.startswith("char_zero")]
        sub = [c for c in checks if c.name.startswith("char_subharmonic")]
        assert len(pos) == 14 and len(zero) == 7 and len(sub) == 10
        assert all(c.passed for c in checks)

    def test_disc_center_values(self, unit_disc):
        checks = vf.characterization_probe([(unit_disc, 0j)])
        for j, c in enumerate(c for c in checks if c.name.startswith("char_pos")):
            expect = math.factorial(j) * math.factorial(j + 1) / math.pi
            assert c.rhs == pytest.approx(expect, rel=1e-9)


@pytest.fixture(scope="module")
def small_config():
    return vf.SuiteConfig(
        entries=[("disc:0,0,1", 0.5 + 0j), ("annulus:0.5", 0.7 + 0j)],
        blb_entries=[("disc:0,0,1", 0j, -2.0, -0.2)],
        thm4_entries=[],
        char_entries=[("polar-complement", 1 + 0j)],
        grid=256,
        profile_steps=8,
        wos_walks=20_000,
        mc_samples=50_000,
    )


class TestRunSuite:
    def test_all_pass_and_structure(self, small_config):
        report = vf.run_suite(small_config)
        assert report.all_passed
        assert report.metadata["checks_total"] == len(report.checks)
        assert report.metadata["checks_failed"] == 0
        assert report.metadata["thm2_empirical_max"] is not None
        assert report.metadata["thm2_empirical_max"] <= vf.THM2_CONSTANT
        names = {c.name.split("[")[0] for c in report.checks}
        assert {"suita", "thm1", "thm2", "poisson", "blb_lower", "blb_monotone", "flux"} <= names

    def test_deterministic_reruns(self, small_config):
        from suita_lab.cli import report_csv_text

        a = vf.run_suite(small_config, suite="suita")
        b = vf.run_suite(small_config, suite="suita")
        assert report_csv_text(a) == report_csv_text(b)

    def test_zero_tolerance_flags_failures(self, small_config):
        cfg = dataclasses.replace(small_config, tolerances={"all": 0.0})
        report = vf.run_suite(cfg)
        assert not report.all_passed  # numerical-noise failures must surface

    def test_suite_filter(self, small_config):
        report = vf.run_suite(small_config, suite="thm1")
        assert report.checks
        assert all(c.name.startswith("thm1") for c in report.checks)

    def test_default_plan_shape(self):
        plan = vf.default_plan()
        assert len(plan) == 16
        literals = [lit for lit, _ in plan]
        assert literals.count("disc:0,0,1") == 3
        assert sum(1 for lit in literals if lit.startswith("annulus")) == 9
        assert sum(1 for lit in literals if lit.startswith("moebius")) == 2
        assert sum(1 for lit in literals if lit.startswith("polygon")) == 1
        assert "polar-complement" in literals
        for lit, w in plan:
            domain = parse_domain(lit)
            from suita_lab.geometry import contains

            assert contains(domain, w)
