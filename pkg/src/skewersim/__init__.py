"""skewersim: a deterministic desk-scale bite-acquisition simulator.

Synthetic food items with decoupled visual and haptic properties, a
probe-then-skewer fork action space, a small from-scratch neural stack for
the visuo-haptic primitive-selection policy and its single-modality
baselines, heatmap-keypoint visual servoing, and a plate-clearing evaluation
harness with a failure taxonomy.
"""

__version__ = "0.1.0"
