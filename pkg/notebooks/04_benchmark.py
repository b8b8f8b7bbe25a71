"""
Error and size across epsilon
=============================
"""

# %%
from faircoreset import BenchConfig, run_benchmark, synthetic_mixture

# %%
D = synthetic_mixture(n=2000, seed=3)
for z in (1, 2):
    cfg = BenchConfig(None, [], [], k=3, z=z, epsilons=(0.1, 0.2, 0.4), trials=50, seed=3)
    report = run_benchmark(cfg, dataset=D)
    print(f"z={z}")
    for r in report.rows:
        print(f"  eps={r.epsilon:.1f} size={r.size:5d} err={r.error:.4f} uniform={r.uniform_error:.4f} "
              f"build={r.t_c_ms:.0f}ms")
    print("  sizes non-increasing:", report.sizes_nonincreasing())
