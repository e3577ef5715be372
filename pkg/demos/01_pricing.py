"""
Extra-price optimisation with a DQN
===================================

A shop sets a markup ("extra price") on top of its marginal price every day.
Higher markups earn more per unit but sell less, following a decreasing
logistic curve. Demand is random. The agent picks one of eight markups per
day and should settle on the one with the best expected profit.

Run from the repository root::

    python demos/01_pricing.py

Figures land in ``demos/out/`` when matplotlib is available.
"""
from pathlib import Path

import numpy as np

from salesdqn import PricingConfig, default_config, evaluate_policy, run_training
from salesdqn.pricing import f_sales, oracle_optimal_action, profit_table

OUT = Path(__file__).parent / "out"

###############################################################################
# Sales response and profit per unit demand
# -----------------------------------------
# With c=15, d=1.5 the logistic midpoint sits exactly at a 50% markup.

steep = PricingConfig(c=15.0, d=1.5)
grid = np.linspace(0, 1.5, 151)
sales_curve = f_sales(steep, grid)
print(f"F_sales at p=0.5 (c=15, d=1.5): {f_sales(steep, 0.5):.3f}")

###############################################################################
# The training parameters (c=7, d=1.7) put the best of the eight actions at
# p=0.5. Because demand multiplies every action the same way, F(p)*p alone
# decides the ranking; that gives us a ground truth to check the agent against.

cfg = default_config("pricing", seed=0, episodes=200)
best, value = oracle_optimal_action(cfg.env)
for p, v in zip(cfg.env.actions, profit_table(cfg.env)):
    print(f"  p={p:<5} F(p)*p={v:.4f}{'  <- best' if p == cfg.env.actions[best] else ''}")

###############################################################################
# Train
# -----
# 8 actions, two hidden layers of 32 units, batch 32, Adam at 1e-3,
# epsilon decays by 0.97 per 7-day episode.

agent = cfg.make_agent()
report = run_training(cfg.env_factory(), agent, cfg.episodes, cfg.make_rng())
rewards = np.array([m.mean_reward for m in report.episodes])
epsilon = np.array([m.epsilon for m in report.episodes])
print(f"mean reward, first 20 episodes: {rewards[:20].mean():.3f}; last 20: {rewards[-20:].mean():.3f}")

###############################################################################
# Greedy policy
# -------------
# With exploration switched off, one action should dominate.

summary = evaluate_policy(cfg.env_factory(), agent, 50, np.random.default_rng(1))
print("greedy action counts:", summary.action_counts.tolist())
print(f"modal action {summary.modal_action} (oracle: {best})")

###############################################################################
# Figures

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    OUT.mkdir(exist_ok=True)
    fig, axes = plt.subplots(2, 3, figsize=(13, 7))
    axes[0, 0].plot(grid, sales_curve)
    axes[0, 0].set(title="Sales vs extra price (c=15, d=1.5)", xlabel="extra price")
    axes[0, 1].plot(grid, sales_curve * grid)
    axes[0, 1].set(title="Profit vs extra price", xlabel="extra price")
    demand = np.random.default_rng(0).uniform(0, 1, 100)
    axes[0, 2].plot(demand)
    axes[0, 2].set(title="Simulated demand", xlabel="day")
    axes[1, 0].plot(epsilon)
    axes[1, 0].set(title="Epsilon", xlabel="episode")
    axes[1, 1].plot(rewards, alpha=0.4)
    axes[1, 1].plot(np.convolve(rewards, np.ones(10) / 10, mode="valid"))
    axes[1, 1].set(title="Mean reward per episode", xlabel="episode")
    steps = np.concatenate([m.actions for m in report.episodes])
    axes[1, 2].scatter(np.arange(len(steps)), steps, s=2)
    axes[1, 2].set(title="Actions vs time", xlabel="step", ylabel="action")
    fig.tight_layout()
    fig.savefig(OUT / "pricing.png", dpi=100)
    print(f"figure written to {OUT / 'pricing.png'}")
