"""Compare the compiled conv kernels against the numpy fallback.

Run from the repo root:

    python benchmarks/bench_kernels.py

Covers the shapes that dominate training (batched history windows) and
serving (a single window), for both float32 and float64, plus one full
model forward+backward per backend.  The backend is forced through
COOPMIND_PURE_KERNELS, the same switch the dispatch layer uses.
"""

import os
import time

import numpy as np

# Shapes: (tag, batch, channels, height, width, filters, kernel)
CONV_CASES = [
    ("train conv1 5x5 grid", 640, 27, 5, 5, 16, 5),
    ("train conv2 5x5 grid", 640, 16, 5, 5, 16, 3),
    ("train conv1 9x5 grid", 640, 27, 5, 9, 16, 5),
    ("serve conv1 (1 window)", 10, 27, 5, 5, 16, 5),
]


def time_call(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats * 1000.0


def bench_conv(dtype):
    from coopmind.nn import conv

    rows = []
    for tag, n, c, h, w, f, k in CONV_CASES:
        rng = np.random.default_rng(0)
        x = rng.standard_normal((n, c, h, w)).astype(dtype)
        weight = (rng.standard_normal((f, c, k, k)) * 0.1).astype(dtype)
        bias = np.zeros(f, dtype=dtype)
        grad = rng.standard_normal(conv.output_shape(x.shape, weight.shape, "same")).astype(dtype)
        repeats = 20 if n < 100 else 5
        fwd = time_call(lambda: conv.conv2d_forward(x, weight, bias, "same"), repeats)
        bwd = time_call(lambda: conv.conv2d_backward(x, weight, grad, "same"), repeats)
        rows.append((tag, np.dtype(dtype).name, fwd, bwd))
    return rows


def bench_model_step():
    from coopmind.data import RolloutSettings, collect_dataset
    from coopmind.agents import Checkpoint, PlannerParams, planner_policy
    from coopmind.env import NUM_CHANNELS, load_layout
    from coopmind.model import ToMConfig, ToMModel
    from coopmind.model.training import build_sample_index

    layout = load_layout("coordination_ring")
    target = planner_policy(layout, PlannerParams(style="egocentric", epsilon=0.1))
    params = PlannerParams(style="partner_aware", epsilon=0.1)
    checkpoint = Checkpoint("cp0", planner_policy(layout, params, policy_id="cp0"), params, 1, 1)
    dataset = collect_dataset(
        layout, target, [checkpoint],
        settings=(RolloutSettings(1, False, False),),
        trajectories_per_pair=2, horizon=80, seed=0,
    )
    index = build_sample_index(dataset.trajectories, layout, 10, 3)
    states, actions, labels = index.gather(range(64))
    model = ToMModel((NUM_CHANNELS, layout.height, layout.width), ToMConfig(seed=0))

    def step():
        probs = model.forward_batch(states, actions)
        loss = model.loss(probs, labels)
        for p in model.parameters():
            p.grad = None
        loss.backward()

    return time_call(step, 3)


def main():
    from coopmind import nn

    print(f"compiled extension available: {nn.HAVE_COMPILED}")
    results = {}
    for backend, forced in (("compiled", "0"), ("numpy fallback", "1")):
        if backend == "compiled" and not nn.HAVE_COMPILED:
            continue
        os.environ["COOPMIND_PURE_KERNELS"] = forced
        rows = []
        for dtype in (np.float32, np.float64):
            rows.extend(bench_conv(dtype))
        step_ms = bench_model_step()
        results[backend] = (rows, step_ms)
    os.environ.pop("COOPMIND_PURE_KERNELS", None)

    header = f"{'case':28s} {'dtype':8s}"
    for backend in results:
        header += f"  {backend + ' fwd/bwd (ms)':>28s}"
    print(header)
    print("-" * len(header))
    any_backend = next(iter(results.values()))[0]
    for i, (tag, dtype, _, _) in enumerate(any_backend):
        line = f"{tag:28s} {dtype:8s}"
        for rows, _ in results.values():
            line += f"  {rows[i][2]:12.2f} /{rows[i][3]:9.2f}"
        print(line)
    print()
    for backend, (_, step_ms) in results.items():
        print(f"full training step (batch 64), {backend}: {step_ms:.0f} ms")


if __name__ == "__main__":
    main()
