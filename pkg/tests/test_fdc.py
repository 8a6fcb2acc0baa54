import math

import numpy as np
import pytest

from propmrf import (
    FORMULA,
    VARIABLE,
    Clause,
    InstanceTooLargeError,
    PropMRF,
    brute_force_marginals,
    canonical_key,
    choose_branch_clause,
    condition_on_clause,
    exact_marginals,
    fdc_count,
    minimal_search_space,
)

from conftest import calibration_model, naive_log_z, random_mixed_model


def test_conditioning_splits_the_assignment_space():
    rng = np.random.default_rng(8401)
    for _ in range(100):
        m = random_mixed_model(rng, max_vars=6)
        occurring = sorted(m.occurring_variables())
        if not occurring:
            continue
        size = int(rng.integers(1, min(3, len(occurring)) + 1))
        chosen = rng.choice(occurring, size=size, replace=False)
        signs = rng.random(size) < 0.5
        r = Clause(int(v) if s else -int(v) for v, s in zip(chosen, signs))
        m_true, m_false = condition_on_clause(m, r)
        assert m_true.hard == m.hard + (r,)
        assert len(m_false.hard) == len(m.hard) + len(r)
        whole = math.exp(naive_log_z(m))
        split = math.exp(naive_log_z(m_true)) + math.exp(naive_log_z(m_false))
        assert split == pytest.approx(whole, rel=1e-12, abs=1e-300)


def test_branch_choice_on_the_calibration_model():
    m = calibration_model()
    candidate = choose_branch_clause(m, FORMULA)
    assert candidate.clause == Clause([1, 2, 3])
    assert candidate.occurrence_count == 2
    assert candidate.size == 3
    unit = choose_branch_clause(m, VARIABLE)
    assert unit.clause == Clause([1])


def test_branch_choice_prefers_shared_intersections():
    m = PropMRF.from_lists(4, soft=[(0.5, [1, 2]), (0.4, [-1, 3]), (0.3, [-1, 4])])
    candidate = choose_branch_clause(m, FORMULA)
    assert candidate.clause == Clause([-1])
    assert candidate.occurrence_count == 2


def test_branch_choice_falls_back_to_most_frequent_literal():
    # every pairwise literal-set intersection is empty; ties resolve toward
    # the smallest literal
    m = PropMRF.from_lists(3, soft=[(0.5, [1, 2]), (0.4, [-1, 3]), (0.3, [-2, -3])])
    candidate = choose_branch_clause(m, FORMULA)
    assert candidate.clause == Clause([1])
    assert candidate.occurrence_count == 1


def test_fdc_count_matches_enumeration_all_configurations():
    rng = np.random.default_rng(8402)
    for _ in range(120):
        m = random_mixed_model(rng, max_vars=7, max_hard=3, max_soft=5)
        expected = naive_log_z(m)
        for mode in (FORMULA, VARIABLE):
            for use_cache in (True, False):
                for threshold in (0, 16):
                    got = fdc_count(
                        m,
                        mode=mode,
                        use_cache=use_cache,
                        ve_width_threshold=threshold,
                    ).log_z
                    if expected == -math.inf:
                        assert got == -math.inf
                    else:
                        assert got == pytest.approx(expected, abs=1e-9)


def test_unsatisfiable_model_counts_to_zero():
    m = PropMRF.from_lists(3, hard=[[1], [-1]], soft=[(0.5, [2, 3])])
    assert fdc_count(m).log_z == -math.inf


def test_empty_and_free_variable_models():
    assert fdc_count(PropMRF(0)).log_z == pytest.approx(0.0, abs=1e-15)
    assert fdc_count(PropMRF(4)).log_z == pytest.approx(
        4 * math.log(2.0), abs=1e-12
    )


def test_single_clause_closed_forms():
    hard = PropMRF.from_lists(3, hard=[[1, -2, 3]])
    assert math.exp(fdc_count(hard, ve_width_threshold=0).log_z) == pytest.approx(
        7.0, rel=1e-12
    )
    soft = PropMRF.from_lists(2, soft=[(0.9, [1, 2])])
    expected = 3 * math.exp(0.9) + 1
    assert math.exp(fdc_count(soft, ve_width_threshold=0).log_z) == pytest.approx(
        expected, rel=1e-12
    )


def test_cache_changes_statistics_not_values():
    m = calibration_model()
    with_cache = fdc_count(m, ve_width_threshold=0)
    without = fdc_count(m, use_cache=False, ve_width_threshold=0)
    assert with_cache.log_z == pytest.approx(without.log_z, abs=1e-12)
    assert without.stats.cache_hits == 0
    assert without.stats.cache_entries == 0
    assert with_cache.stats.cache_hits > 0
    # cached runs resolve no more calls than uncached ones
    assert with_cache.stats.leaves <= without.stats.leaves


def test_canonical_key_identifies_renamed_models():
    a = PropMRF.from_lists(4, hard=[[1, 2]], soft=[(0.5, [2, 3]), (0.1, [4])])
    b = PropMRF.from_lists(4, hard=[[3, 4]], soft=[(0.5, [4, 1]), (0.1, [2])])
    assert canonical_key(a) == canonical_key(b)
    c = PropMRF.from_lists(4, hard=[[1, 2]], soft=[(0.6, [2, 3]), (0.1, [4])])
    assert canonical_key(a) != canonical_key(c)
    assert canonical_key(a, with_weights=False) == canonical_key(
        c, with_weights=False
    )


def test_calibration_search_space_sizes():
    m = calibration_model()
    formula = minimal_search_space(m, FORMULA)
    variable = minimal_search_space(m, VARIABLE)
    assert formula.leaves == 7
    assert formula.nodes == 3
    assert variable.leaves == 12


def test_minimal_search_space_terminal_cases():
    tiny = PropMRF.from_lists(2, soft=[(0.3, [1, 2])])
    stats = minimal_search_space(tiny, FORMULA)
    assert (stats.leaves, stats.nodes) == (1, 0)
    resolved = PropMRF.from_lists(1, hard=[[1]])
    stats = minimal_search_space(resolved, VARIABLE)
    assert (stats.leaves, stats.nodes) == (1, 0)


def test_minimal_search_space_size_guard():
    with pytest.raises(InstanceTooLargeError):
        minimal_search_space(PropMRF(11), FORMULA)
    wide = PropMRF.from_lists(
        7, soft=[(0.1, [v, v % 7 + 1]) for v in range(1, 8)]
    )
    with pytest.raises(InstanceTooLargeError):
        minimal_search_space(wide, FORMULA)


def test_formula_minimum_never_exceeds_variable_minimum():
    rng = np.random.default_rng(8403)
    strict = 0
    for _ in range(40):
        m = random_mixed_model(rng, max_vars=6, max_hard=1, max_soft=4)
        if m.num_clauses > 6:
            continue
        formula = minimal_search_space(m, FORMULA)
        variable = minimal_search_space(m, VARIABLE)
        assert formula.leaves <= variable.leaves
        if formula.leaves < variable.leaves:
            strict += 1
    assert strict > 0


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        fdc_count(PropMRF(1), mode="mixed")


def test_exact_marginals_match_enumeration():
    rng = np.random.default_rng(8404)
    for _ in range(40):
        m = random_mixed_model(rng, max_vars=6, max_hard=2, max_soft=4)
        if naive_log_z(m) == -math.inf:
            continue
        got = exact_marginals(m)
        expected = brute_force_marginals(m)
        assert np.max(np.abs(got - expected)) < 1e-9


def test_exact_marginals_reject_zero_partition_function():
    m = PropMRF.from_lists(1, hard=[[1], [-1]])
    with pytest.raises(ValueError):
        exact_marginals(m)
