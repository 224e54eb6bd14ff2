"""ddpc-cli - regularized data-driven predictive control and its Monte-Carlo benchmark."""

__version__ = "0.1.0"
