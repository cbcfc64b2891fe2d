"""Card-game engines with a trajectory, filtering, prompt-rendering and evaluation pipeline."""

__version__ = "0.1.0"
