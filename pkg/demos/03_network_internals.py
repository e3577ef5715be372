"""
The Q-network by hand
=====================

The function approximator is a small numpy MLP with explicit backprop.
This script shows the pieces the agent is built from: a forward pass, the
masked loss on the taken action, a finite-difference check of the
gradients, and a single Adam step.

    python demos/03_network_internals.py
"""
import numpy as np

from salesdqn import nn

params = nn.init_network([9, 64, 64, 7], seed=42)
print("weight shapes:", [w.shape for w in params.weights])

x = np.random.default_rng(0).uniform(size=9)
trace = nn.forward(params, x)
q = trace.output
print("Q(s, .) =", np.round(q, 4))

###############################################################################
# Only the action actually taken receives an error signal. Here action 2 is
# pushed toward a target of 1.0; the other six outputs are left alone.

action = 2
mask = np.zeros(7, dtype=bool)
mask[action] = True
target = q.copy()
target[action] = 1.0
grads = nn.backward(params, trace, target, mask)

###############################################################################
# Central differences on a handful of weights agree with backprop.

rng = np.random.default_rng(1)
h = 1e-5
for _ in range(5):
    layer = int(rng.integers(3))
    i, j = (int(rng.integers(n)) for n in params.weights[layer].shape)
    w = params.weights[layer]
    orig = w[i, j]
    w[i, j] = orig + h
    up = nn.masked_loss(params, x, target, mask)
    w[i, j] = orig - h
    down = nn.masked_loss(params, x, target, mask)
    w[i, j] = orig
    print(f"layer {layer} w[{i},{j}]: backprop {grads.weights[layer][i, j]: .3e}  "
          f"finite diff {(up - down) / (2 * h): .3e}")

###############################################################################
# One Adam step with learning rate 1e-3 moves Q(s, 2) toward the target.

nn.adam_step(params, grads, 0.001)
print(f"Q(s, 2): {q[action]:.4f} -> {nn.predict(params, x)[action]:.4f} (target 1.0)")
