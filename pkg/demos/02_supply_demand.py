"""
Supply-demand control on a demand time series
=============================================

Each day the agent orders 0-12 packs of product. Unsold product stays in
stock, unmet demand is lost. The reward is sales profit minus a processing
cost per unit supplied. The agent sees tomorrow's promo flag, yesterday's
sales and the weekday, so it can learn weekday- and promo-dependent orders.

This demo uses the bundled synthetic demand generator; pass a CSV path as
the first argument to train on your own series instead::

    python demos/02_supply_demand.py [demand.csv]

Training 300 episodes of 150 days takes roughly half a minute.
"""
import sys
from pathlib import Path

import numpy as np

from salesdqn import default_config, evaluate_policy, run_training, write_report

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

###############################################################################
# Configuration: two hidden layers of 64 units, gamma 0.3, epsilon decay
# 0.995, 150-day episodes starting at a random lag of 0-25 days.

overrides = {"data": {"path": str(Path(sys.argv[1]).resolve())}} if len(sys.argv) > 1 else {}
cfg = default_config("supply", seed=0, **overrides)
series = cfg.load_series()
print(f"{len(series)} days of demand, {series.promo.mean():.0%} promo days")
for wd, name in enumerate(["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]):
    print(f"  {name}: mean demand {series.demand[series.weekday == wd].mean():.3f}")

###############################################################################
# Train and export every metric as CSV (the same files ``salesdqn train``
# writes).

agent = cfg.make_agent()
report = run_training(cfg.env_factory(), agent, cfg.episodes, cfg.make_rng(), config=cfg.to_dict())
rewards = np.array([m.mean_reward for m in report.episodes])
q = len(rewards) // 4
print(f"mean reward, first quartile {rewards[:q].mean():.3f}; last quartile {rewards[-q:].mean():.3f}")
manifest = write_report(report, OUT / "supply_run")
print("wrote", ", ".join(f["name"] for f in manifest["files"]))

###############################################################################
# Action frequencies per weekday
# ------------------------------
# Unlike the pricing case, several actions share the work: the best order
# depends on the day and on promotions.

heat = sum(m.weekday_action for m in report.episodes[-50:])
print("packs ordered by weekday over the last 50 episodes (rows Mon..Sun):")
print(heat)

###############################################################################
# A greedy episode: demand, supply, stock and shortage

summary = evaluate_policy(cfg.env_factory(), agent, 1, np.random.default_rng(3))
tr = summary.traces[0]
print(f"greedy episode: {len(tr)} days, total shortage {sum(tr.shortage):.2f}, "
      f"mean stock {np.mean(tr.stock):.3f}, mean reward {summary.mean_reward:.3f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(2, 2, figsize=(12, 7))
    axes[0, 0].plot(series.demand[:150])
    axes[0, 0].set(title="Demand (first 150 days)", xlabel="day")
    axes[0, 1].plot(rewards, alpha=0.4)
    axes[0, 1].plot(np.convolve(rewards, np.ones(20) / 20, mode="valid"))
    axes[0, 1].set(title="Mean reward per episode", xlabel="episode")
    axes[1, 0].imshow(heat, aspect="auto", cmap="viridis")
    axes[1, 0].set(title="Action frequency vs weekday", xlabel="action", ylabel="weekday")
    for name in ("demand", "supply", "stock", "shortage"):
        axes[1, 1].plot(getattr(tr, name)[:60], label=name)
    axes[1, 1].legend()
    axes[1, 1].set(title="Greedy episode, first 60 days", xlabel="day")
    fig.tight_layout()
    fig.savefig(OUT / "supply.png", dpi=100)
    print(f"figure written to {OUT / 'supply.png'}")
