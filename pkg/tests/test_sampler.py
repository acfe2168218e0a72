import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy import stats as sp_stats

from ndsan.distributions import Constant, Exponential, Triangular, TruncatedNormal, Uniform
from ndsan.errors import CyclicGraphError, MultipleSourcesOrSinksError, ValidationError
from ndsan.model import Acyclic, Decision, Loop, Trivial, series
from ndsan.rng import RngStream, Streams, stream_keys
from ndsan.sampler import critical_path, draw, run_batch, sample, sample_block


def const(v, name="c"):
    return Trivial(name, Constant(v))


# -- RNG streams -----------------------------------------------------------------


def test_stream_is_reproducible():
    assert np.array_equal(RngStream(42, 3).uniforms(20), RngStream(42, 3).uniforms(20))


def test_distinct_streams_share_no_prefix():
    a = RngStream(42, 0).uniforms(50)
    b = RngStream(42, 1).uniforms(50)
    c = RngStream(43, 0).uniforms(50)
    assert not set(a) & set(b)
    assert not set(a) & set(c)


def test_streams_look_independent_and_uniform():
    keys = Streams(stream_keys(7, np.arange(200_000)))
    u0, u1 = keys.uniform(0), keys.uniform(1)
    assert ((u0 > 0) & (u0 < 1)).all()
    assert abs(np.corrcoef(u0, u1)[0, 1]) < 0.01
    assert sp_stats.kstest(u0, "uniform").pvalue > 1e-3
    # adjacent replication indices
    assert abs(np.corrcoef(u0[:-1], u0[1:])[0, 1]) < 0.01


# -- draw ---------------------------------------------------------------------------


def test_draw_constant():
    assert draw(Constant(3), RngStream(1)) == 3.0


def test_triangular_inverse_cdf_median():
    assert float(Triangular(0, 1, 2).ppf(0.5)) == 1.0


def test_triangular_mean_and_support():
    dist = Triangular(2, 4, 5)
    mean_by_quadrature = integrate.quad(lambda x: x * float(dist.pdf(x)), 2, 5, points=[4])[0]
    assert mean_by_quadrature == pytest.approx(11 / 3, abs=1e-9)
    x = run_batch(Trivial("a", dist), 10**6, 5).times
    assert x.min() >= 2 and x.max() <= 5
    assert abs(x.mean() - mean_by_quadrature) <= 0.01


@pytest.mark.parametrize(
    "dist",
    [Triangular(2, 4, 5), TruncatedNormal(90, 45), Uniform(1, 3), Exponential(0.5)],
    ids=lambda d: d.family,
)
def test_draws_follow_the_law(dist):
    x = run_batch(Trivial("a", dist), 100_000, 11).times
    lo, hi = dist.support()
    assert x.min() >= lo
    if dist.family != "exponential":
        assert x.max() <= hi
    assert sp_stats.kstest(x, lambda t: dist.cdf(t)).pvalue > 1e-3


def test_truncated_normal_matches_scipy_truncnorm():
    dist = TruncatedNormal(14, 7)
    ref = sp_stats.truncnorm(-3, 3, loc=14, scale=np.sqrt(7))
    t = np.linspace(5, 23, 37)
    assert np.allclose(dist.cdf(t), ref.cdf(t), atol=1e-12)


# -- critical path ------------------------------------------------------------------


def test_critical_path_examples():
    assert critical_path([[]], [7]) == 7
    assert critical_path([[1, 2], [3], [3], []], [1, 3, 5, 2]) == 8


def test_critical_path_errors():
    with pytest.raises(CyclicGraphError):
        critical_path([[1], [0]], [1, 1])
    with pytest.raises(MultipleSourcesOrSinksError):
        critical_path([[1, 2], [], []], [1, 1, 1])


def enumerate_paths(succ, u, sink):
    if u == sink:
        yield [u]
    for v in succ[u]:
        for p in enumerate_paths(succ, v, sink):
            yield [u] + p


def random_dag(rng, n):
    perm = rng.permutation(n)
    arcs = {(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < 0.35}
    for v in range(1, n):
        if not any(j == v for _, j in arcs):
            arcs.add((int(rng.integers(0, v)), v))
    for v in range(n - 1):
        if not any(i == v for i, _ in arcs):
            arcs.add((v, int(rng.integers(v + 1, n))))
    # relabel so vertex order is not topological
    succ = [[] for _ in range(n)]
    for i, j in arcs:
        succ[perm[i]].append(int(perm[j]))
    return succ, int(perm[0]), int(perm[n - 1])


def test_critical_path_matches_path_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(300):
        n = int(rng.integers(1, 11))
        succ, s, t = random_dag(rng, n)
        w = list(rng.uniform(0, 10, n))
        brute = max(sum(w[v] for v in p) for p in enumerate_paths(succ, s, t))
        assert critical_path(succ, w) == brute


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 10), st.integers(0, 9), st.floats(0, 5))
def test_critical_path_is_monotone(seed, n, which, bump):
    rng = np.random.default_rng(seed)
    succ, _, _ = random_dag(rng, n)
    w = list(rng.uniform(0, 10, n))
    before = critical_path(succ, w)
    w[which % n] += bump
    assert critical_path(succ, w) >= before


def test_critical_path_order_independent():
    # same DAG with arcs listed in different orders
    succ = [[1, 2, 3], [4], [4], [4], []]
    w = [1.0, 2.0, 7.0, 3.0, 1.0]
    assert critical_path(succ, w) == critical_path([[3, 2, 1], [4], [4], [4], []], w) == 9.0


# -- sample ---------------------------------------------------------------------------


def test_sample_trivial_constant():
    assert sample(const(5), RngStream(0)) == 5.0


def test_sample_rejects_invalid_network():
    with pytest.raises(ValidationError):
        sample(Loop(const(0), const(1), const(0), [0.5]), RngStream(0))


def test_pure_series_of_constants_is_exact():
    batch = run_batch(series(const(1.5), const(2.25), const(3)), 100, 1)
    assert np.all(batch.times == 6.75)


def test_decision_frequencies():
    net = Decision(const(1), [(0.55, const(10)), (0.45, const(20))], const(1))
    x = run_batch(net, 10**6, 3).times
    assert set(np.unique(x)) == {12.0, 22.0}
    assert abs(np.mean(x == 12) - 0.55) <= 0.005


def test_loop_frequencies():
    net = Loop(const(0), const(2), const(0), [0.5, 0.2, 0.0])
    x = run_batch(net, 10**6, 4).times
    assert set(np.unique(x)) == {0.0, 2.0, 4.0}
    for value, p in [(0, 0.5), (2, 0.4), (4, 0.1)]:
        assert abs(np.mean(x == value) - p) <= 0.005


def test_loop_iteration_counts_pass_chi_square():
    q = [0.7, 0.6, 0.3, 0.0]
    net = Loop(const(0), const(1), const(0), q)
    x = run_batch(net, 10**6, 9).times.astype(int)
    observed = np.bincount(x, minlength=4)
    expected = np.array([0.3, 0.7 * 0.4, 0.7 * 0.6 * 0.7, 0.7 * 0.6 * 0.3]) * 10**6
    assert sp_stats.chisquare(observed, expected).pvalue > 0.01


def test_loop_never_taken():
    assert np.all(run_batch(Loop(const(1), const(5), const(2), [0.0]), 50, 0).times == 3.0)


def test_shared_vertex_is_sampled_once():
    # Both paths go through vertex 0; the max must see one value, not two.
    tri = Trivial("a", Uniform(0, 1))
    net = Acyclic([tri, const(0), const(0), const(0)], [(0, 1), (0, 2), (1, 3), (2, 3)])
    x = run_batch(net, 100_000, 2).times
    assert sp_stats.kstest(x, "uniform").pvalue > 1e-3


def test_sample_lower_bound():
    net = load_dev()
    x = run_batch(net, 2000, 8).times
    floor = 2 + 1 + 0.5 + 0.5 + 0.5 + 0.5  # a1 a2 a4 a5 a6 a27 minima
    assert x.min() >= floor and np.isfinite(x).all()


def load_dev():
    from ndsan.netspec import load_example

    return load_example("development-process").root


# -- run_batch -------------------------------------------------------------------------


def test_run_batch_constant():
    batch = run_batch(const(2), 4, 123)
    assert list(batch.times) == [2, 2, 2, 2]
    assert batch.N == 4 and batch.master_seed == 123


def test_run_batch_is_deterministic():
    net = load_dev()
    a = run_batch(net, 3000, 77).times
    b = run_batch(net, 3000, 77).times
    assert a.tobytes() == b.tobytes()
    assert run_batch(net, 3000, 78).times.tobytes() != a.tobytes()


def test_replication_i_equals_single_sample():
    net = load_dev()
    batch = run_batch(net, 500, 31)
    for i in (0, 1, 17, 250, 499):
        assert sample(net, RngStream(31, i)) == batch.times[i]


def test_block_size_and_threads_do_not_change_results(monkeypatch):
    import ndsan.sampler as sampler_mod

    net = load_example_review()
    ref = run_batch(net, 5000, 5).times
    monkeypatch.setattr(sampler_mod, "BLOCK_SIZE", 777)
    assert run_batch(net, 5000, 5, threads=3).times.tobytes() == ref.tobytes()
    shuffled = np.random.default_rng(0).permutation(5000)
    assert np.array_equal(sample_block(net, 5, shuffled), ref[shuffled])


def load_example_review():
    from ndsan.netspec import load_example

    return load_example("paper-review").root


def test_development_process_is_bimodal():
    from ndsan.stats import histogram

    x = run_batch(load_dev(), 4624, 2024).times
    lower, upper = x[x < 26], x[x >= 26]
    assert lower.size and upper.size
    assert lower.max() <= 16 and upper.max() <= 60
    # nothing in the gap between the modes
    assert np.sum((x > 18) & (x < 30)) == 0
    # modal 1-wide bins sit inside the two fitted supports
    low_peak = max(histogram(lower, 1.0), key=lambda bc: bc[1])[0]
    high_peak = max(histogram(upper, 1.0), key=lambda bc: bc[1])[0]
    assert 7 < low_peak <= 16
    assert 37 < high_peak <= 60
