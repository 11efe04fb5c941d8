"""Smoke tests for the python bindings (stdlib only)."""

import math
import sys

import galton_dnp as g


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def test_tunneling():
    assert g.tunneling_probability(0.0, 0.5) == 1.0
    assert approx(
        g.tunneling_probability(math.sqrt(0.13), 0.13), math.exp(-1.0), 1e-14
    )
    gap = g.gap_for_eta(0.3, 0.7)
    assert approx(g.tunneling_probability(gap, 0.7), 0.3)


def test_hamming():
    assert g.hamming_order(2) == [0, 1, 2, 3]
    assert g.hamming_order(3)[:4] == [0, 1, 2, 4]
    assert g.hamming_index(0, 3) == 1
    assert g.hamming_state(8, 3) == 7


def test_closed_form_and_walk():
    pops = g.analytic_full_sweep(16, 0.5, 0.5)
    assert approx(g.hyperpolarization(pops), 0.252193128690124, 1e-12)
    assert approx(pops.mass(), 1.0)

    # matching grid walk on a uniform board
    m = 16
    rate = 1.0
    g_anti = 30.0
    g_off = g.gap_for_eta(0.5, rate)
    gaps, crossings = [], []
    for k in range(1, m + 1):
        for l in range(1, m + 1):
            crossings.append(10.0 * k + 10.7 * l)
            gaps.append(g_anti if l == m + 1 - k else g_off)
    board = g.checkerboard_from_gaps(m, gaps, crossings)
    assert board.n_states == 16 and board.n_spins == 4
    assert board.grid_monotone

    init = g.PopulationVector.uniform_m0(m)
    field = g.dp_sweep(board, init, rate, model="classical")
    closed = g.analytic_full_sweep(m, 0.5, 0.5)
    for n in range(m):
        total = field.exits.m0[n] + field.exits.m1[n]
        assert approx(total, closed.m0[n], 1e-11)
    assert field.polarization() > 0.0
    assert field.max_conservation_error < 1e-12


def test_path_probability():
    m = 2
    rate = 1.0
    g_half = g.gap_for_eta(0.5, rate)  # eta = 1/2 at every node
    gaps, crossings = [], []
    for k in range(1, m + 1):
        for l in range(1, m + 1):
            crossings.append(10.0 * k + 10.7 * l)
            gaps.append(g_half)
    board = g.checkerboard_from_gaps(m, gaps, crossings)
    # straight down column 2: passes two nodes, eta each time
    p = g.path_probability(board, (0, 2), (3, 2), rate)
    assert approx(p, 0.25, 1e-12)


def test_dos_and_sweep():
    board, levels, seed_used, mc = g.sample_board_from_dos(
        "gaussian", center=2900.0, width=13.5, n_states=16, gap_scale=2.0
    )
    assert not mc
    assert len(levels) == 16
    assert all(levels[i] <= levels[i + 1] for i in range(15))

    init = g.PopulationVector.uniform_m0(16)
    result = g.simulate_window_sweep(
        board, init, f0=levels[0] - 1.0, delta_f=2.0, sweep_rate=0.13
    )
    assert len(result.polarization_history) == 1
    assert result.polarization == result.polarization_history[0]

    f0s, pol = g.map_spectrum(
        board,
        2870.0,
        2930.0,
        5.0,
        delta_f=5.0,
        sweep_rate=0.13,
        n_jobs=2,
    )
    assert len(f0s) == len(pol) == 13


def test_fits():
    xs = [2830.0 + i for i in range(141)]
    ys = [2.1 * math.exp(-0.5 * ((x - 2900.0) / 13.5) ** 2) for x in xs]
    fit = g.fit_gaussian(xs, ys)
    assert fit.converged
    assert approx(fit.param("center_1"), 2900.0, 1e-6)
    assert approx(fit.param("amplitude_1"), 2.1, 1e-6)

    ts = [0.5 * i for i in range(301)]
    vs = [0.9 - 1.2 * math.exp(-t / 30.0) for t in ts]
    rfit = g.fit_relaxation(ts, vs)
    assert approx(rfit.param("t1"), 30.0, 1e-6)

    curve = g.accumulate_buildup(0.8, 0.2, 0.05, [0.0, 1.0, 1e9])
    assert curve[0] == 0.0
    assert approx(curve[2], 0.64, 1e-9)


def test_errors():
    try:
        g.tunneling_probability(1.0, -1.0)
    except g.GaltonError:
        pass
    else:
        raise AssertionError("expected GaltonError for a negative rate")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
