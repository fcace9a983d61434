import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrc.core import ConceptError, ExampleDistribution, HypothesisMatrix, make_rng
from lrc.datagen import generate_identity
from lrc.teacher import TeacherConfig, epsilon_bad, respond

from conftest import random_instance


def ten_columns():
    # row 1 differs from row 0 on exactly three columns
    h = HypothesisMatrix(np.vstack([np.zeros(10, int), [1, 1, 1] + [0] * 7, np.eye(10, dtype=int)[4:]]))
    return h, ExampleDistribution.uniform(10)


class TestEpsilonBad:
    def test_self(self):
        h, p = ten_columns()
        assert not epsilon_bad(h, 0, 0, p, 0.01)

    def test_mass_at_least(self):
        h, p = ten_columns()
        assert epsilon_bad(h, 1, 0, p, 0.2)

    def test_mass_below(self):
        h, p = ten_columns()
        assert not epsilon_bad(h, 1, 0, p, 0.35)


class TestConfig:
    @pytest.mark.parametrize("eps,delta", [(0.0, 0.1), (1.0, 0.1), (0.1, 0.0), (0.1, 1.0), (None, 0.1)])
    def test_pac_ranges(self, eps, delta):
        with pytest.raises(ConceptError):
            TeacherConfig(0, ExampleDistribution.uniform(2), "pac", eps, delta)

    def test_mode(self):
        with pytest.raises(ConceptError):
            TeacherConfig(0, ExampleDistribution.uniform(2), "adversarial")


class TestRespond:
    def test_exact_accepts_target(self, rng):
        h = generate_identity(4)
        assert respond(h, 2, TeacherConfig.exact(2, ExampleDistribution.uniform(4)), rng).accepted

    def test_pac_accepts_good_enough(self, rng):
        h, p = ten_columns()
        r = respond(h, 1, TeacherConfig.pac(0, p, 0.35, 0.1), rng)
        assert r.accepted

    def test_pac_counter_when_bad(self, rng):
        h, p = ten_columns()
        r = respond(h, 1, TeacherConfig.pac(0, p, 0.2, 0.1), rng)
        assert not r.accepted and r.counter.column in (0, 1, 2)

    def test_identity_two_choices(self):
        # target e1, query e4 (0-based rows 0 and 3): D = {0, 3}, each w.p. 1/2
        h = generate_identity(4)
        cfg = TeacherConfig.exact(0, ExampleDistribution.uniform(4))
        rng = make_rng(77)
        cols = []
        for _ in range(20_000):
            cx = respond(h, 3, cfg, rng).counter
            assert cx.target_value == (1 if cx.column == 0 else 0)
            cols.append(cx.column)
        assert set(cols) == {0, 3}
        f = cols.count(0) / len(cols)
        assert abs(f - 0.5) <= 3 * np.sqrt(0.25 / len(cols))

    @given(st.integers(0, 10_000), st.data())
    @settings(max_examples=80, deadline=None)
    def test_counter_example_invariant(self, seed, data):
        h, p = random_instance(seed)
        target = data.draw(st.integers(0, h.n - 1))
        query = data.draw(st.integers(0, h.n - 1).filter(lambda q: q != target))
        r = respond(h, query, TeacherConfig.exact(target, p), make_rng(seed))
        x = r.counter.column
        assert h.values[query, x] != r.counter.target_value
        assert h.values[target, x] == r.counter.target_value

    @given(st.integers(0, 10_000), st.floats(0.01, 0.99), st.data())
    @settings(max_examples=80, deadline=None)
    def test_pac_rule(self, seed, eps, data):
        h, p = random_instance(seed)
        target = data.draw(st.integers(0, h.n - 1))
        query = data.draw(st.integers(0, h.n - 1))
        r = respond(h, query, TeacherConfig.pac(target, p, eps, 0.1), make_rng(seed))
        assert r.accepted == (not epsilon_bad(h, query, target, p, eps))

    def test_frequencies_match_conditional(self):
        # chi-square goodness of fit against P conditioned on D(query, target)
        from scipy import stats

        p = ExampleDistribution([0.05, 0.15, 0.3, 0.2, 0.3])
        h = HypothesisMatrix([[0, 0, 0, 0, 0], [1, 1, 0, 1, 1], [0, 1, 1, 0, 1]])
        cfg = TeacherConfig.exact(0, p)
        rng = make_rng(3)
        n = 40_000
        counts = np.zeros(5)
        for _ in range(n):
            counts[respond(h, 1, cfg, rng).counter.column] += 1
        diff = [0, 1, 3, 4]
        expected = p.probs[diff] / p.probs[diff].sum() * n
        assert counts[2] == 0
        assert stats.chisquare(counts[diff], expected).pvalue > 1e-3
