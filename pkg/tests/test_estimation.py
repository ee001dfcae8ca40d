import math

import numpy as np
import pytest

from wigmetro import (
    DegenerateLikelihoodError,
    DomainError,
    HalfInt,
    PhaseConfig,
    PhotonSectorEnsemble,
    SectorState,
    cfi_from_distribution,
    crb_report,
    dpc_distribution,
    ec_ensemble,
    mle_phase,
    noon,
    sample_outcomes,
)
from wigmetro.estimation import OutcomeCounts, default_bracket, log_likelihood, trial_seed

SINGLE = PhaseConfig.SINGLE_ARM


def test_trial_seeds_are_deterministic_and_distinct():
    assert trial_seed(1, 0) == trial_seed(1, 0)
    seeds = {trial_seed(1, t) for t in range(100)}
    assert len(seeds) == 100
    assert trial_seed(1, 0) != trial_seed(2, 0)


def test_sampling_is_reproducible():
    dist = dpc_distribution(noon(3), 0.2, SINGLE)
    a = sample_outcomes(dist, 1000, 42)
    b = sample_outcomes(dist, 1000, 42)
    assert a.counts == b.counts
    assert a.total == 1000
    assert sample_outcomes(dist, 1000, 43).counts != a.counts


def test_sampling_a_certain_outcome():
    dist = dpc_distribution(noon(1), 0.0, SINGLE)
    assert sample_outcomes(dist, 500, 0).counts == {(0, 1): 500}


def test_sampling_frequencies_within_four_sigma():
    nu = 200_000
    dist = dpc_distribution(noon(2), 0.3, SINGLE)
    counts = sample_outcomes(dist, nu, 9).counts
    for n_a, n_b, p, _ in dist.entries:
        sigma = math.sqrt(nu * p * (1 - p))
        assert abs(counts.get((n_a, n_b), 0) - nu * p) <= 4 * sigma + 1e-9


def test_sampling_rejects_empty_run():
    with pytest.raises(DomainError):
        sample_outcomes(dpc_distribution(noon(1), 0.0, SINGLE), 0, 1)


def test_counts_must_add_up():
    with pytest.raises(DomainError):
        OutcomeCounts({(1, 0): 3}, 4, 0)


def test_default_bracket():
    lo, hi = default_bracket(noon(4), 0.3)
    assert lo == pytest.approx(0.3 - math.pi / 8) or lo == 0.0
    assert hi == pytest.approx(0.3 + math.pi / 8)
    assert default_bracket(noon(1), 0.1) == (0.0, pytest.approx(0.1 + math.pi / 2))


def test_log_likelihood_peaks_near_truth():
    dist = dpc_distribution(noon(2), 0.3, SINGLE)
    counts = sample_outcomes(dist, 10_000, 5)
    grid = np.linspace(0.2, 0.4, 81)
    ll = log_likelihood(counts, noon(2), SINGLE, grid)
    assert abs(grid[np.argmax(ll)] - 0.3) < 0.02


@pytest.mark.parametrize("probe", [noon(2), noon(5), ec_ensemble(math.sqrt(5))], ids=["noon2", "noon5", "ec"])
def test_mle_within_five_sigma(probe):
    nu, phi = 10_000, 0.3
    dist = dpc_distribution(probe, phi, SINGLE)
    fisher = cfi_from_distribution(dist).value
    counts = sample_outcomes(dist, nu, 11)
    result = mle_phase(counts, probe, SINGLE, default_bracket(probe, phi))
    assert abs(result.phi_hat - phi) <= 5 / math.sqrt(nu * fisher)
    assert result.bracket[0] <= result.phi_hat <= result.bracket[1]


def test_mle_large_sample_ec():
    probe = ec_ensemble(math.sqrt(5))
    nu, phi = 10**6, 0.5
    dist = dpc_distribution(probe, phi, SINGLE)
    fisher = cfi_from_distribution(dist).value
    result = mle_phase(sample_outcomes(dist, nu, 3), probe, SINGLE, default_bracket(probe, phi))
    assert abs(result.phi_hat - phi) <= 5 / math.sqrt(nu * fisher)


def test_flat_likelihood_is_reported():
    vacuum = PhotonSectorEnsemble.pure(SectorState(HalfInt(0), [1.0]))
    counts = OutcomeCounts({(0, 0): 100}, 100, 0)
    with pytest.raises(DegenerateLikelihoodError):
        mle_phase(counts, vacuum, SINGLE, (0.1, 0.5))


def test_impossible_counts_are_reported():
    # a three-photon click cannot come from a one-photon probe
    with pytest.raises(DegenerateLikelihoodError):
        mle_phase(OutcomeCounts({(3, 0): 1}, 1, 0), noon(1), SINGLE, (0.1, 0.5))


def test_empty_bracket():
    with pytest.raises(DomainError):
        mle_phase(OutcomeCounts({(1, 0): 1}, 1, 0), noon(1), SINGLE, (0.2, 0.2))


def test_crb_report_fields():
    rep = crb_report(noon(2), SINGLE, 0.3, 2000, 20, seed=4)
    d = rep.as_dict()
    assert d["fisher"] == pytest.approx(4.0, abs=1e-8)
    assert d["crb"] == pytest.approx(1 / 8000)
    assert "PCG64" in d["prng"]
    assert rep.estimates.shape == (20,)
    again = crb_report(noon(2), SINGLE, 0.3, 2000, 20, seed=4)
    assert np.array_equal(rep.estimates, again.estimates)


def test_variance_halves_when_sample_doubles():
    a = crb_report(noon(2), SINGLE, 0.3, 10_000, 200, seed=5)
    b = crb_report(noon(2), SINGLE, 0.3, 20_000, 200, seed=5)
    assert 0.4 <= b.empirical_variance / a.empirical_variance <= 0.6


def test_estimator_is_nearly_unbiased():
    rep = crb_report(noon(2), SINGLE, 0.3, 10_000, 200, seed=6)
    assert abs(rep.bias) <= 4 * rep.bias_stderr


def test_crb_needs_two_trials():
    with pytest.raises(DomainError):
        crb_report(noon(2), SINGLE, 0.3, 100, 1, seed=0)
