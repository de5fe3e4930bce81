"""Inner-product-space inequality catalog, equality certification, and stress testing."""

__version__ = "0.1.0"
