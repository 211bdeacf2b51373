"""Serf activation numerics, a from-scratch MLP stack and an ablation harness."""
