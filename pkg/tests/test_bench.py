import numpy as np
import pytest

from factgraph import WSConfig, emit_csv, run_sweep, watts_strogatz
from factgraph.bench import parse_summary


class TestWattsStrogatz:
    def test_no_rewiring_gives_exact_ring_lattice(self):
        g = watts_strogatz(WSConfig(n=20, k=4, p_rewire=0.0, seed=0))
        degrees = g.weights.sum(axis=1)
        assert np.all(degrees == 4)
        # ring neighbours at offsets 1 and 2
        for i in range(20):
            for off in (1, 2):
                assert g.weights[i, (i + off) % 20] == 1.0

    def test_edge_count_preserved_by_rewiring(self):
        for seed in range(8):
            for p in (0.0, 0.1, 0.5, 1.0):
                cfg = WSConfig(n=60, k=6, p_rewire=p, seed=seed)
                g = watts_strogatz(cfg)
                assert g.weights.sum() / 2 == 60 * 6 / 2
                assert np.all(np.diagonal(g.weights) == 0)

    def test_five_hundred_vertex_edge_count(self):
        g = watts_strogatz(WSConfig(n=500, k=4, p_rewire=0.1, seed=1))
        assert g.weights.sum() / 2 == 1000

    def test_same_seed_same_edges(self):
        cfg = WSConfig(n=80, k=4, p_rewire=0.3, seed=11)
        a = watts_strogatz(cfg)
        b = watts_strogatz(cfg)
        assert np.array_equal(a.weights, b.weights)

    def test_invalid_configs_rejected(self):
        with pytest.raises(ValueError):
            WSConfig(n=10, k=3, p_rewire=0.1)  # odd k
        with pytest.raises(ValueError):
            WSConfig(n=4, k=4, p_rewire=0.1)  # k not below n
        with pytest.raises(ValueError):
            WSConfig(n=10, k=4, p_rewire=1.5)


@pytest.fixture(scope="module")
def sweep():
    graph = watts_strogatz(WSConfig(n=200, k=4, p_rewire=0.1, seed=3))
    return run_sweep(graph, ds=(0.6, 0.85, 0.95))


class TestRunSweep:

    def test_iterations_increase_with_damping(self, sweep):
        iters = [row.iterations for row in sweep.rows]
        assert all(i is not None for i in iters)
        assert iters[0] < iters[1] < iters[2]

    def test_factor_is_damping_times_lambda2(self, sweep):
        for row in sweep.rows:
            assert row.factor == pytest.approx(row.d * row.lambda2)
            assert row.converged

    def test_step_residuals_monotone_after_transient(self, sweep):
        for row in sweep.rows:
            r = np.array(sweep.reports[row.d].step_residuals)
            assert np.all(np.diff(r[3:]) <= 1e-15)

    def test_tail_slope_within_theorem_bound(self, sweep):
        # log-residual slope in the converged tail vs log(d * lambda2) + 0.05
        for row in sweep.rows:
            r = np.array(sweep.reports[row.d].step_residuals)
            tail = r[len(r) // 2:]
            tail = tail[tail > 0]
            slope = np.polyfit(np.arange(len(tail)), np.log(tail), 1)[0]
            assert slope <= np.log(row.factor) + 0.05

    def test_nonconvergence_recorded_not_fatal(self):
        graph = watts_strogatz(WSConfig(n=100, k=4, p_rewire=0.05, seed=2))
        result = run_sweep(graph, ds=(0.95,), max_iter=5)
        row = result.rows[0]
        assert row.converged is False
        assert row.iterations is None
        assert 0.95 in result.reports

    def test_invalid_damping_rejected(self):
        graph = watts_strogatz(WSConfig(n=20, k=4, p_rewire=0.1, seed=0))
        with pytest.raises(ValueError):
            run_sweep(graph, ds=(1.0,))


class TestEmitCsv:
    @pytest.fixture()
    def small_result(self):
        graph = watts_strogatz(WSConfig(n=40, k=4, p_rewire=0.1, seed=5))
        return run_sweep(graph, ds=(0.6, 0.85, 0.95))

    def test_summary_has_header_plus_row_per_damping(self, small_result, tmp_path):
        written = emit_csv(small_result, tmp_path)
        summary = tmp_path / "summary.csv"
        assert summary in written
        lines = summary.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == "d,iterations,converged,lambda2,factor"

    def test_nonconverged_row_formatting(self, tmp_path):
        graph = watts_strogatz(WSConfig(n=40, k=4, p_rewire=0.1, seed=5))
        result = run_sweep(graph, ds=(0.95,), max_iter=3)
        emit_csv(result, tmp_path)
        line = (tmp_path / "summary.csv").read_text().splitlines()[1]
        d, iterations, converged, lam, factor = line.split(",")
        assert iterations == ""
        assert converged == "false"
        assert float(lam) > 0

    def test_round_trip_parse(self, small_result, tmp_path):
        emit_csv(small_result, tmp_path)
        rows = parse_summary(tmp_path / "summary.csv")
        for parsed, original in zip(rows, small_result.rows):
            assert parsed.iterations == original.iterations
            assert parsed.converged == original.converged
            assert parsed.d == pytest.approx(original.d, abs=1e-6)
            assert parsed.lambda2 == pytest.approx(original.lambda2, abs=1e-6)
            # formatted values parse back to exactly what was printed
            assert f"{parsed.d:.6f}" == f"{original.d:.6f}"
            assert f"{parsed.factor:.6f}" == f"{original.factor:.6f}"

    def test_residual_files_written_per_damping(self, small_result, tmp_path):
        written = emit_csv(small_result, tmp_path)
        for d in (0.6, 0.85, 0.95):
            path = tmp_path / f"residuals_d{d:g}.csv"
            assert path in written
            lines = path.read_text().splitlines()
            assert lines[0] == "t,residual,envelope_bound"
            assert len(lines) >= 3

    def test_empty_result_rejected(self, tmp_path):
        from factgraph.bench import SweepResult
        with pytest.raises(ValueError):
            emit_csv(SweepResult(rows=[], reports={}), tmp_path)
