"""portalkit: a data/metadata object engine with a portal service on top."""

__version__ = "0.1.0"
