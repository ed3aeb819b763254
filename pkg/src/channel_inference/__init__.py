"""Finite categorical probability: states, channels, disintegration and inference."""
