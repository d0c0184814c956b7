"""Exit criteria for the simulator, one test per criterion."""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from qwqram import bench, formats
from qwqram.oracle import (
    DenseBuilder,
    OperatorSpec,
    OpKind,
    check_adjoint,
    check_unitary,
    is_permutation_matrix,
)
from qwqram.pipeline import qram, qram_traced, query, route, run_pipeline, unroute
from qwqram.state import (
    AddressSuperposition,
    BasisState,
    MemoryTable,
    NodeIndex,
    SparseState,
    TreeShape,
    canonical_entries,
    make_initial_state,
    max_amplitude_difference,
)
from qwqram.walk import apply_coin, apply_shift_level, level_step_down

from conftest import DEMO_ADDRESSES, DEMO_MEMORY, DEMO_SHAPE, INV_SQRT3, random_state

DATA = Path(__file__).parent / "data"


def expected_state(terms):
    """Equal-amplitude state from ``(w, l, c, a, d)`` tuples listed by hand."""
    return SparseState.from_entries(
        DEMO_SHAPE, [((NodeIndex(l, w), c, a, d), INV_SQRT3) for w, l, c, a, d in terms]
    )


def lookup_oracle(shape, addrs, mem):
    return SparseState.from_entries(
        shape, [((NodeIndex(0, 0), 0, a, mem[a]), amp) for a, amp in addrs.terms]
    )


def test_1_demo_golden_states(acceptance_report):
    x = DEMO_MEMORY
    expected = {
        "psi0_0": [(0, 0, 0, a, 0) for a in DEMO_ADDRESSES],
        "psi0_1": [(0, 1, 0, 0b001, 0), (0, 1, 0, 0b011, 0), (1, 1, 1, 0b110, 0)],
        "psi0_2": [(0, 2, 0, 0b001, 0), (1, 2, 1, 0b011, 0), (3, 2, 1, 0b110, 0)],
        "psi0_3": [(1, 3, 1, 0b001, 0), (3, 3, 1, 0b011, 0), (6, 3, 0, 0b110, 0)],
        "query": [(1, 3, 1, 0b001, x[1]), (3, 3, 1, 0b011, x[3]), (6, 3, 0, 0b110, x[6])],
        "psix_0": [(0, 0, 0, a, x[a]) for a in DEMO_ADDRESSES],
    }
    start = time.perf_counter()
    final, trace = qram_traced(DEMO_SHAPE, AddressSuperposition.uniform(DEMO_ADDRESSES), MemoryTable(DEMO_SHAPE, x))
    elapsed = time.perf_counter() - start
    worst = max(max_amplitude_difference(trace[label], expected_state(t)) for label, t in expected.items())
    ok = worst <= 1e-9 and elapsed < 1.0 and trace.final == final
    acceptance_report(1, ok, f"max amplitude error {worst:.1e} (tol 1e-9), {elapsed:.3f}s (limit 1s)")
    assert ok


def test_2_end_to_end_contract(acceptance_report):
    rng = np.random.default_rng(2)
    worst, elapsed, count = 0.0, 0.0, 0
    for n in range(1, 7):
        for m in range(1, 5):
            shape = TreeShape(n, m)
            for _ in range(200):
                mem = MemoryTable.random(shape, rng)
                size = int(rng.integers(1, (1 << n) + 1))
                picks = rng.choice(1 << n, size=size, replace=False).tolist()
                addrs = AddressSuperposition([(a, complex(rng.normal(), rng.normal())) for a in picks])
                start = time.perf_counter()
                out = qram(shape, addrs, mem)
                elapsed += time.perf_counter() - start
                worst = max(worst, max_amplitude_difference(out, lookup_oracle(shape, addrs, mem)))
                count += 1
    ok = worst <= 1e-9 and elapsed < 10.0
    acceptance_report(2, ok, f"{count} instances, max error {worst:.1e} (tol 1e-9), pipeline {elapsed:.2f}s (limit 10s)")
    assert ok


def test_3_unitarity_and_reversibility(acceptance_report):
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    unitary_dev = adjoint_dev = roundtrip_dev = 0.0
    all_permutations = True
    for n in range(1, 4):
        for m in range(1, 3):
            shape = TreeShape(n, m)
            builder = DenseBuilder(shape)
            for spec in OperatorSpec.all_for(shape, MemoryTable.random(shape, rng)):
                mat = builder.build(spec)
                unitary_dev = max(unitary_dev, check_unitary(mat))
                all_permutations &= is_permutation_matrix(mat)
            for l in range(n):
                adjoint_dev = max(adjoint_dev, check_adjoint(l, shape, builder=builder))
    for i in range(100):
        shape = TreeShape(1 + i % 5, 1 + i % 3)
        state = random_state(shape, rng)
        roundtrip_dev = max(roundtrip_dev, max_amplitude_difference(unroute(route(state)), state))
    elapsed = time.perf_counter() - start
    ok = (unitary_dev <= 1e-10 and all_permutations and adjoint_dev <= 1e-12
          and roundtrip_dev <= 1e-12 and elapsed < 30.0)
    acceptance_report(
        3, ok,
        f"|U^dag U - I| {unitary_dev:.1e} (tol 1e-10), permutation={all_permutations}, "
        f"adjoint {adjoint_dev:.1e}, unroute.route {roundtrip_dev:.1e} (tol 1e-12), {elapsed:.1f}s (limit 30s)",
    )
    assert ok


def test_4_involutions(acceptance_report):
    rng = np.random.default_rng(4)
    worst = 0.0
    for n in range(1, 6):
        for m in range(1, 4):
            shape = TreeShape(n, m)
            for _ in range(20):
                state = random_state(shape, rng)
                mem = MemoryTable.random(shape, rng)
                for l in range(n):
                    worst = max(worst, max_amplitude_difference(apply_shift_level(apply_shift_level(state, l), l), state))
                for k in range(n + 1):
                    worst = max(worst, max_amplitude_difference(apply_coin(apply_coin(state, k), k), state))
                worst = max(worst, max_amplitude_difference(query(query(state, mem), mem), state))
                worst = max(worst, max_amplitude_difference(run_pipeline(run_pipeline(state, mem), mem), state))
                picks = rng.choice(1 << n, size=min(3, 1 << n), replace=False).tolist()
                initial = make_initial_state(shape, AddressSuperposition.uniform(picks))
                worst = max(worst, max_amplitude_difference(run_pipeline(run_pipeline(initial, mem), mem), initial))
    ok = worst <= 1e-12
    acceptance_report(4, ok, f"max deviation from identity {worst:.1e} (tol 1e-12)")
    assert ok


def test_5_complexity(acceptance_report):
    ns = [4, 8, 16, 20]
    steps_ok = support_ok = True
    times = []
    for n in ns:
        shape = TreeShape(n, 4)
        addrs, mem = bench.make_instance(shape, 16, np.random.default_rng(n))
        steps, sizes = bench.count_steps(shape, addrs, mem)
        steps_ok &= steps == n + 1 + n
        support_ok &= all(s == len(addrs) == 16 for s in sizes)
        times.append(bench.time_pipeline(shape, addrs, mem, reps=200, rounds=7))
    linear, slope, intercept, ratios = bench.linear_fit(ns, times, factor=2.0)
    ok = steps_ok and support_ok and linear
    acceptance_report(
        5, ok,
        f"steps=2n+1 {steps_ok}, support=|A| {support_ok}, "
        f"t(n) us {[round(t * 1e6, 1) for t in times]}, measured/fit {[round(r, 2) for r in ratios]} (within 2x)",
    )
    assert ok


def test_6_routing_closed_form(acceptance_report):
    rng = np.random.default_rng(6)
    mismatches = 0
    for _ in range(500):
        n = int(rng.integers(1, 11))
        a = int(rng.integers(0, 1 << n))
        state = make_initial_state(TreeShape(n, 1), [(a, 1)])
        for j in range(1, n + 1):
            state = level_step_down(state, j - 1)
            w = sum(2 ** (j - k) * ((a >> (n - k)) & 1) for k in range(1, j + 1))
            expected = [(BasisState(NodeIndex(j, w), (a >> (n - j)) & 1, a, 0), 1 + 0j)]
            mismatches += canonical_entries(state) != expected
    ok = mismatches == 0
    acceptance_report(6, ok, f"500 addresses, {mismatches} level mismatches")
    assert ok


def test_7_format_round_trips(acceptance_report):
    rng = np.random.default_rng(7)
    failures = 0
    for _ in range(100):
        n, m = int(rng.integers(1, 7)), int(rng.integers(1, 5))
        shape = TreeShape(n, m)
        state = random_state(shape, rng)
        failures += formats.parse_state(formats.serialize_state(state)) != state
        mem = MemoryTable.random(shape, rng)
        failures += formats.parse_memory(formats.serialize_memory(mem), shape) != mem
        picks = rng.choice(1 << n, size=int(rng.integers(1, (1 << n) + 1)), replace=False).tolist()
        addrs = AddressSuperposition([(a, complex(rng.normal(), rng.normal())) for a in picks])
        failures += formats.parse_addresses(formats.serialize_addresses(addrs, shape), shape, normalize=False) != addrs
        _, trace = qram_traced(shape, addrs, mem)
        back = formats.parse_trace(formats.serialize_trace(trace))
        failures += back.labels != trace.labels or any(x != y for (_, x), (_, y) in zip(back.steps, trace.steps))
    args = [sys.executable, "-m", "qwqram", "run", "--n", "3", "--m", "2", "--trace",
            "--memory", str(DATA / "demo_memory.tsv"), "--addresses", str(DATA / "demo_addresses.tsv")]
    runs = [subprocess.run(args, capture_output=True) for _ in range(2)]
    identical = runs[0].returncode == 0 and runs[0].stdout == runs[1].stdout
    ok = failures == 0 and identical
    acceptance_report(7, ok, f"{failures} round-trip failures over 400 documents, CLI reruns byte-identical={identical}")
    assert ok
